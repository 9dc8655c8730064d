#ifndef MUSCERT_CERTIFY_H_
#define MUSCERT_CERTIFY_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "muscert/core.h"
#include "muscert/smoothing.h"

namespace muscert {

// Which noise mask the certifying model uses: none (plain smoothing) or
// μ = φ(x), i.e. the attribution's features are exempt from noise.
enum class MuMode { kNone, kPhi };

const char* mu_mode_name(MuMode mode);
// "none" | "phi"; throws ParameterError otherwise.
MuMode parse_mu_mode(std::string_view text);

// The model that certifies φ(x) under `mode`.
SmoothedModel model_for_mode(const SmoothedModel& model, const Mask& phi_x,
                             MuMode mode);

struct Radius {
  double real = 0.0;
  size_t integer = 0;
};

// gap / (2λ) and its floor; negative gaps clamp to zero.
Radius radius_from_gap(double gap, double lambda);

// class(g(x, 1)) == class(g(x, φ(x))).
bool consistency_check(const SmoothedModel& model, std::span<const double> x,
                       const Mask& phi_x);

// Adding up to `integer` features to φ(x) keeps the class of g(x, φ(x)).
Radius incremental_radius(const SmoothedModel& model,
                          std::span<const double> x, const Mask& phi_x);

// Removing up to `integer` non-attributed features from 1 keeps the class of
// g(x, 1).
Radius decremental_radius(const SmoothedModel& model,
                          std::span<const double> x);

struct CertRecord {
  std::string id;
  std::string phi;        // φ(x) as a 0/1 string
  size_t class_full = 0;  // class of f(x) = g(x, 1)
  size_t class_attr = 0;  // class of g(x, φ(x))
  bool consistent = false;
  double gap_at_attr = 0.0;
  double gap_at_ones = 0.0;
  double r_inc_real = 0.0;
  double r_dec_real = 0.0;
  size_t r_inc = 0;
  size_t r_dec = 0;
  double lambda = 0.0;
  uint64_t q = 0;
  uint64_t lambda_num = 0;
  uint64_t seed = 0;
  MuMode mu_mode = MuMode::kNone;
};

CertRecord certify_example(const SmoothedModel& model,
                           std::span<const double> x, const Mask& phi_x,
                           std::string id, MuMode mode = MuMode::kNone);

// One JSON object on a single line, "type":"cert".
std::string cert_record_to_json(const CertRecord& record);

enum class StabilityMode { kIncremental, kDecremental };

// Largest number of free (non-attributed) features the exhaustive checks
// accept; 2^20 supersets.
inline constexpr size_t kMaxEnumeratedFreeFeatures = 20;

// Direct definitional check by enumeration over α ⪰ φ(x):
//   incremental: ‖α − φ(x)‖₁ ≤ radius, class must equal class(g(x, φ(x)))
//   decremental: ‖1 − α‖₁ ≤ radius, class must equal class(g(x, 1))
// Throws ResourceError when n − |φ(x)| exceeds kMaxEnumeratedFreeFeatures.
bool brute_force_stability_oracle(const SmoothedModel& model,
                                  std::span<const double> x, const Mask& phi_x,
                                  size_t radius, StabilityMode mode);

// Every α ⪰ φ(x) yields the class of g(x, φ(x)).
bool full_stability_check(const SmoothedModel& model,
                          std::span<const double> x, const Mask& phi_x);

}  // namespace muscert

#endif  // MUSCERT_CERTIFY_H_
