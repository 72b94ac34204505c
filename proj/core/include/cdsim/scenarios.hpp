#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cdsim/config.hpp"
#include "cdsim/simkernel.hpp"

namespace cdsim {

/// The Cartesian product n × v_max × algorithm × seed × mode, seeds offset
/// by `seed_base`.
std::vector<RunSpec> expand_matrix(const ScenarioConfig& config, std::uint64_t seed_base = 0);

/// Sort key of the CSV: algorithm tag, mode, n, v_max, seed.
bool record_less(const MetricsRecord& a, const MetricsRecord& b);
void sort_records(std::vector<MetricsRecord>& records);

struct MatrixOptions {
  std::size_t jobs = 1;
  std::uint64_t seed_base = 0;
  /// Called once per finished run, serialized, in completion order.
  std::function<void(const MetricsRecord&)> on_record;
  /// When set, gives each run its own trace stream (may return null).
  std::function<std::unique_ptr<std::ostream>(const RunSpec&)> trace_for;
};

/// Runs every cell of the matrix on up to `jobs` threads. Failed runs come
/// back as failed records; the result is sorted and does not depend on
/// scheduling.
std::vector<MetricsRecord> run_matrix(const ScenarioConfig& config, const MatrixOptions& options = {});

/// Header plus one row per record, sorted, numbers with 6 significant
/// digits. Metric fields of failed runs read `NA`.
void emit_csv(std::vector<MetricsRecord> records, std::ostream& out);
/// Throws Error when the file cannot be written.
void emit_csv(std::vector<MetricsRecord> records, const std::filesystem::path& path);

/// Reads what emit_csv wrote. Throws Error on a malformed header or row.
std::vector<MetricsRecord> read_csv(std::istream& in);

/// Per-metric aggregate of one group.
struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single value
};

struct SummaryRow {
  Algorithm algorithm = Algorithm::EasCds;
  RouteMode mode = RouteMode::Cds;
  std::size_t nodes = 0;
  double v_max = 0.0;
  std::size_t runs = 0;
  std::size_t failed = 0;
  Aggregate cds_size;
  Aggregate lifetime;
  Aggregate rreq;
  Aggregate sent;
  Aggregate delivered;
  Aggregate pdr;
  /// (mean - baseline mean) / baseline mean for the same mode, n and v_max;
  /// empty when the baseline group is missing or its mean is zero.
  std::optional<double> cds_size_vs_base;
  std::optional<double> lifetime_vs_base;
  std::optional<double> rreq_vs_base;
  std::optional<double> pdr_vs_base;
};

Aggregate aggregate(const std::vector<double>& values);

/// Groups by (algorithm, mode, n, v_max) over successful runs. Groups with no
/// successful run are omitted and reported in `warnings`.
std::vector<SummaryRow> summarize(const std::vector<MetricsRecord>& records, Algorithm baseline,
                                  std::vector<std::string>* warnings = nullptr);

void write_summary(const std::vector<SummaryRow>& rows, std::ostream& out);

}  // namespace cdsim
