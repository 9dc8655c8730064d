#ifndef MUSCERT_IO_H_
#define MUSCERT_IO_H_

#include <string>

namespace muscert {

// Throw IoError naming the path on failure.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace muscert

#endif  // MUSCERT_IO_H_
