#include "muscert/io.h"

#include <charconv>
#include <fstream>
#include <sstream>

#include "muscert/error.h"

namespace muscert {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDimension: return "dimension";
    case ErrorKind::kArity: return "arity";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kClassifierContract: return "classifier-contract";
    case ErrorKind::kPrecondition: return "precondition";
    case ErrorKind::kResource: return "resource";
    case ErrorKind::kCapability: return "capability";
    case ErrorKind::kNumerical: return "numerical";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kSchema: return "schema";
    case ErrorKind::kData: return "data";
    case ErrorKind::kParameter: return "parameter";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("failed reading '" + path + "'");
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << contents;
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::string format_double(double value) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

}  // namespace muscert
