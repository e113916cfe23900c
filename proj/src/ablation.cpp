#include "qemlab/ablation.hpp"

#include <numeric>

#include "qemlab/error.hpp"

namespace qem {

const char* ablation_name(AblationMode mode) {
  switch (mode) {
    case AblationMode::Standard: return "standard";
    case AblationMode::RandomBackend: return "random_backend";
    case AblationMode::RandomNoisy: return "random_noisy";
    case AblationMode::RandomCircuit: return "random_circuit";
    case AblationMode::RandomCircuitBackend: return "random_circuit_backend";
  }
  return "unknown";
}

AblationMode parse_ablation(const std::string& name) {
  if (name == "standard") return AblationMode::Standard;
  if (name == "random_backend") return AblationMode::RandomBackend;
  if (name == "random_noisy") return AblationMode::RandomNoisy;
  if (name == "random_circuit") return AblationMode::RandomCircuit;
  if (name == "random_circuit_backend") return AblationMode::RandomCircuitBackend;
  throw ValidationError("unknown ablation mode '" + name + "'");
}

Dataset randomize_inputs(const Dataset& d, AblationMode mode, Rng& rng) {
  Dataset out = d;
  if (mode == AblationMode::Standard) return out;

  const auto n = d.records.size();
  if (n < 2) throw ValidationError("randomize_inputs: need at least 2 records to permute");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);

  for (std::size_t i = 0; i < n; ++i) {
    const auto& src = d.records[perm[i]];
    switch (mode) {
      case AblationMode::RandomBackend:
        out.records[i].backend = src.backend;
        break;
      case AblationMode::RandomNoisy:
        out.records[i].p_noisy = src.p_noisy;
        break;
      case AblationMode::RandomCircuit:
        out.records[i].encoded = src.encoded;
        break;
      case AblationMode::RandomCircuitBackend:
        out.records[i].encoded = src.encoded;
        out.records[i].backend = src.backend;
        break;
      case AblationMode::Standard:
        break;
    }
  }
  return out;
}

}  // namespace qem
