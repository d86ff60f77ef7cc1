#pragma once

// Artifact writers. Every CSV starts with a header row and prints floats
// with 17 significant digits so that reruns are byte-identical.

#include "sli/convergence.hpp"
#include "sli/discrete.hpp"
#include "sli/estimators.hpp"
#include "sli/particle_system.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace sli::io {

std::string format_double(double v);

/// replication,particle,jump_time (one row per jump).
void write_paths_csv(const std::filesystem::path& file,
                     std::span<const std::vector<PathRecord>> replications);

/// bin,value,stderr
void write_pmf_csv(const std::filesystem::path& file, const PmfEstimate& pmf);
void write_pmf_csv(const std::filesystem::path& file, std::span<const double> probs);

/// bin,value,stderr with bin = the threshold.
void write_cdf_csv(const std::filesystem::path& file, std::span<const double> thresholds,
                   std::span<const ScalarEstimate> values);

/// t,i,j,P
void write_fp_csv(const std::filesystem::path& file, std::span<const FpState> snapshots);

/// N,mse,n_reps
void write_convergence_csv(const std::filesystem::path& file, std::span<const StudyRow> rows);

/// index,value
void write_sample_csv(const std::filesystem::path& file, std::span<const double> values);

void write_json(const std::filesystem::path& file, const nlohmann::json& doc);
void write_text(const std::filesystem::path& file, const std::string& text);

/// Binary terminal-X histogram, little-endian:
///   char[4] "SLIH", u32 version = 1, u32 m, u32 reserved = 0,
///   u64 n, u64 counts[m + 1]
struct TerminalHistogram {
  std::uint32_t m = 0;
  std::uint64_t n = 0;
  std::vector<std::uint64_t> counts;

  friend bool operator==(const TerminalHistogram&, const TerminalHistogram&) = default;
};

TerminalHistogram histogram_of(std::span<const PathRecord> paths, int m);
void write_histogram(const std::filesystem::path& file, const TerminalHistogram& h);
TerminalHistogram read_histogram(const std::filesystem::path& file);

}  // namespace sli::io
