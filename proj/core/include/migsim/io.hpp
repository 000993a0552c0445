#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "migsim/dynamics.hpp"
#include "migsim/estimators.hpp"
#include "migsim/kinetic.hpp"

namespace migsim {

// Snapshot table: a `# config_hash=...` comment line, a header, then one row
// per point and snapshot with columns (replicate_id, time, point_id, x1[, x2]).
// An empty snapshot is marked by a sentinel row with point_id = -1 so the
// reader can reconstruct it.  Numbers are written with full precision;
// rewriting the same records gives byte-identical files.
void write_snapshots_csv(const std::filesystem::path& path,
                         std::span<const ReplicateRecord> records, int dim,
                         std::uint64_t config_hash);

std::vector<ReplicateRecord> read_snapshots_csv(const std::filesystem::path& path,
                                                int dim);

// Per-replicate summary (seed, status, events, final state, snapshot sizes).
void write_replicates_json(const std::filesystem::path& path,
                           std::span<const ReplicateRecord> records,
                           std::uint64_t config_hash);

// Event log for one replicate: (time, kind, point_id, x1[, x2]).
void write_event_log_csv(const std::filesystem::path& path,
                         const ReplicateRecord& record, int dim);

void write_certificate_json(const std::filesystem::path& path,
                            const CertificateReport& report, double time,
                            std::size_t box_index, std::uint64_t config_hash);

// (r_mid, g_hat, ci_lo, ci_hi) rows.
void write_pair_correlation_csv(const std::filesystem::path& path,
                                std::span<const PairCorrelationBin> bins,
                                double time, std::uint64_t config_hash);

// (time, mean_density, min_density, max_density) rows.
void write_trajectory_csv(const std::filesystem::path& path,
                          std::span<const std::array<double, 4>> rows,
                          std::uint64_t config_hash);

// Density field dump: 8-byte magic, little-endian header length, JSON header
// (dim, nodes, side, time), then raw row-major float64 values.
void write_field(const std::filesystem::path& path, const DensityField& field);
DensityField read_field(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace migsim
