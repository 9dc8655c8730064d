#include "muscert/certify.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <utility>

#include "json.hpp"

namespace muscert {
namespace {

void check_phi(const SmoothedModel& model, const Mask& phi_x) {
  if (phi_x.size() != model.n()) {
    throw DimensionError("attribution has " + std::to_string(phi_x.size()) +
                         " entries, model has " + std::to_string(model.n()) +
                         " feature groups");
  }
}

// Calls visit(α) for every α ⪰ φ whose number of added features lies in
// [min_added, max_added]; stops early when visit returns false.
bool for_each_superset(const Mask& phi, size_t min_added, size_t max_added,
                       const std::function<bool(const Mask&)>& visit) {
  std::vector<size_t> free;
  for (size_t i = 0; i < phi.size(); ++i) {
    if (!phi[i]) free.push_back(i);
  }
  if (free.size() > kMaxEnumeratedFreeFeatures) {
    throw ResourceError("exhaustive check over " + std::to_string(free.size()) +
                        " free features exceeds the limit of " +
                        std::to_string(kMaxEnumeratedFreeFeatures));
  }
  const uint64_t total = uint64_t{1} << free.size();
  Mask alpha = phi;
  for (uint64_t word = 0; word < total; ++word) {
    const auto added = static_cast<size_t>(std::popcount(word));
    if (added < min_added || added > max_added) continue;
    for (size_t b = 0; b < free.size(); ++b) {
      alpha.set(free[b], (word >> b) & 1u);
    }
    if (!visit(alpha)) return false;
  }
  return true;
}

}  // namespace

const char* mu_mode_name(MuMode mode) {
  return mode == MuMode::kPhi ? "phi" : "none";
}

MuMode parse_mu_mode(std::string_view text) {
  if (text == "none") return MuMode::kNone;
  if (text == "phi") return MuMode::kPhi;
  throw ParameterError("unknown mu mode '" + std::string(text) +
                       "' (expected none or phi)");
}

SmoothedModel model_for_mode(const SmoothedModel& model, const Mask& phi_x,
                             MuMode mode) {
  if (mode == MuMode::kPhi) return model.with_mu(phi_x);
  return model;
}

Radius radius_from_gap(double gap, double lambda) {
  if (!(lambda > 0.0)) throw ParameterError("lambda must be positive");
  Radius r;
  r.real = gap > 0.0 ? gap / (2.0 * lambda) : 0.0;
  r.integer = static_cast<size_t>(std::floor(r.real));
  return r;
}

bool consistency_check(const SmoothedModel& model, std::span<const double> x,
                       const Mask& phi_x) {
  check_phi(model, phi_x);
  const TopClass full = top_class_and_gap(smoothed_predict(model, x));
  const TopClass attr = top_class_and_gap(mus_evaluate(model, x, phi_x));
  return full.cls == attr.cls;
}

Radius incremental_radius(const SmoothedModel& model,
                          std::span<const double> x, const Mask& phi_x) {
  check_phi(model, phi_x);
  const TopClass top = top_class_and_gap(mus_evaluate(model, x, phi_x));
  return radius_from_gap(top.gap, model.lambda());
}

Radius decremental_radius(const SmoothedModel& model,
                          std::span<const double> x) {
  const TopClass top = top_class_and_gap(smoothed_predict(model, x));
  return radius_from_gap(top.gap, model.lambda());
}

CertRecord certify_example(const SmoothedModel& model,
                           std::span<const double> x, const Mask& phi_x,
                           std::string id, MuMode mode) {
  check_phi(model, phi_x);
  const SmoothedModel certifier = model_for_mode(model, phi_x, mode);
  const TopClass full = top_class_and_gap(smoothed_predict(certifier, x));
  const TopClass attr = top_class_and_gap(mus_evaluate(certifier, x, phi_x));
  const Radius inc = radius_from_gap(attr.gap, certifier.lambda());
  const Radius dec = radius_from_gap(full.gap, certifier.lambda());

  CertRecord rec;
  rec.id = std::move(id);
  rec.phi = phi_x.to_string();
  rec.class_full = full.cls;
  rec.class_attr = attr.cls;
  rec.consistent = full.cls == attr.cls;
  rec.gap_at_attr = attr.gap;
  rec.gap_at_ones = full.gap;
  rec.r_inc_real = inc.real;
  rec.r_dec_real = dec.real;
  rec.r_inc = inc.integer;
  rec.r_dec = dec.integer;
  rec.lambda = certifier.lambda();
  rec.q = certifier.cfg().q();
  rec.lambda_num = certifier.cfg().lambda_num();
  rec.seed = certifier.cfg().seed();
  rec.mu_mode = mode;
  return rec;
}

std::string cert_record_to_json(const CertRecord& r) {
  nlohmann::ordered_json j;
  j["type"] = "cert";
  j["id"] = r.id;
  j["phi"] = r.phi;
  j["class_full"] = r.class_full;
  j["class_attr"] = r.class_attr;
  j["consistent"] = r.consistent;
  j["gap_at_attr"] = r.gap_at_attr;
  j["gap_at_ones"] = r.gap_at_ones;
  j["r_inc_real"] = r.r_inc_real;
  j["r_dec_real"] = r.r_dec_real;
  j["r_inc"] = r.r_inc;
  j["r_dec"] = r.r_dec;
  j["lambda"] = r.lambda;
  j["q"] = r.q;
  j["lambda_num"] = r.lambda_num;
  j["seed"] = r.seed;
  j["mu_mode"] = mu_mode_name(r.mu_mode);
  return j.dump();
}

bool brute_force_stability_oracle(const SmoothedModel& model,
                                  std::span<const double> x, const Mask& phi_x,
                                  size_t radius, StabilityMode mode) {
  check_phi(model, phi_x);
  const size_t free = model.n() - phi_x.popcount();
  size_t min_added = 0;
  size_t max_added = free;
  Logits reference_logits;
  if (mode == StabilityMode::kIncremental) {
    max_added = std::min(radius, free);
    reference_logits = mus_evaluate(model, x, phi_x);
  } else {
    // ‖1 − α‖₁ = free − added ≤ radius.
    min_added = free > radius ? free - radius : 0;
    reference_logits = smoothed_predict(model, x);
  }
  const size_t reference = top_class_and_gap(reference_logits).cls;
  return for_each_superset(phi_x, min_added, max_added, [&](const Mask& a) {
    return top_class_and_gap(mus_evaluate(model, x, a)).cls == reference;
  });
}

bool full_stability_check(const SmoothedModel& model,
                          std::span<const double> x, const Mask& phi_x) {
  check_phi(model, phi_x);
  const size_t free = model.n() - phi_x.popcount();
  const size_t reference =
      top_class_and_gap(mus_evaluate(model, x, phi_x)).cls;
  return for_each_superset(phi_x, 0, free, [&](const Mask& a) {
    return top_class_and_gap(mus_evaluate(model, x, a)).cls == reference;
  });
}

}  // namespace muscert
