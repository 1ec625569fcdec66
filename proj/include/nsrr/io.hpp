#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nsrr/chain.hpp"
#include "nsrr/pipeline.hpp"
#include "nsrr/synthetic.hpp"

namespace nsrr {

inline constexpr const char* kFormatVersion = "1.0";

struct ChainMetadata {
  std::optional<double> pixel_size;
  std::optional<std::string> description;
};

/// Parses a chain document. Throws DataError with a field-level diagnostic
/// on malformed input, and with the full violation list when the decoded
/// chain breaks an invariant.
SectionChain read_chain(const std::filesystem::path& path);

void write_chain(const SectionChain& chain, const std::filesystem::path& path,
                 const ChainMetadata& metadata = {});

/// Parses a transform document. Every entry carries the rotation matrix and
/// its angle redundantly; they must agree within 1e-9. The matrix is
/// authoritative. `require_fixed_endpoints` additionally demands exact
/// identity / zero first and last entries (solver output satisfies this;
/// sequential-baseline output intentionally does not).
std::vector<RigidTransform2> read_transforms(
    const std::filesystem::path& path, bool require_fixed_endpoints = false);

void write_transforms(std::span<const RigidTransform2> transforms,
                      const std::filesystem::path& path);

void write_solve_report(const SolveReport& report, int n_sections,
                        double epe_after, const std::filesystem::path& path);

/// CSV with header noise_ratio,mean_mse,std_mse,mean_mse_unregistered and
/// full-precision decimal values.
void write_sweep_csv(std::span<const SweepRow> rows,
                     const std::filesystem::path& path);

/// Shortest decimal string that round-trips the double exactly.
std::string format_full_precision(double value);

}  // namespace nsrr
