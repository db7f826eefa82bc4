#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <json.hpp>

#include "hdc/encoder.hpp"
#include "hdc/instrumentation.hpp"
#include "hdc/model.hpp"

namespace hdc {

struct LoadedModel {
  ClassMemory memory;
  Basis basis;
};

// Model file: "HDCM", u32 version 1, u32 kind, D, J, L, f64 sigma, u64 seed,
// then L*D f64 prototypes and L f64 norms, all little-endian. The basis is
// regenerated from the header on load.
std::vector<std::uint8_t> encode_model(const ClassMemory& memory);

// Rebuilds the basis and checks every stored norm against the recomputed
// one to 1e-9 relative.
LoadedModel decode_model(std::span<const std::uint8_t> bytes);

void save_model(const ClassMemory& memory, const std::filesystem::path& path);
LoadedModel load_model(const std::filesystem::path& path);

nlohmann::json to_json(const OpCounter& ops);
nlohmann::json to_json(const StageCounters& ops);

// Metrics object with the run configuration embedded under "config".
nlohmann::json metrics_json(const MetricsRecord& m, const nlohmann::json& config);

// Single-line JSON followed by a newline.
void write_json_line(const nlohmann::json& doc, const std::filesystem::path& path);

}  // namespace hdc
