#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "critwave/evolution.hpp"
#include "critwave/grid.hpp"
#include "critwave/harmonic_map.hpp"

namespace critwave {

// Shortest round-trip decimal for a double; the basis of byte-deterministic
// CSV output.
std::string format_double(double value);

nlohmann::json load_json(const std::filesystem::path& path);
void save_json(const std::filesystem::path& path, const nlohmann::json& j);

// Snapshot CSV: r,v,v_t,u,u_t. Reading checks grid consistency.
void write_snapshot_csv(const std::filesystem::path& path,
                        const FieldState& state);
FieldState read_snapshot_csv(const std::filesystem::path& path, int k);

// Versioned binary checkpoint for exact restart.
void write_checkpoint(const std::filesystem::path& path,
                      const FieldState& state);
FieldState read_checkpoint(const std::filesystem::path& path);

// Series CSV: t,E,E_kin,sup_u,sup_vr,tail@R...,virial1,virial2,
// virial_main1,virial_main2,virial_tail,snorm_acc.
void write_series_csv(const std::filesystem::path& path,
                      const RunRecord& record);

// Profile CSV: r,Q,dQ/ds over the solved s-range.
void write_profile_csv(const std::filesystem::path& path,
                       const HarmonicMapProfile& profile);

}  // namespace critwave
