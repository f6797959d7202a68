#pragma once

#include "cstl/dataset.hpp"
#include "cstl/simulation.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cstl {

//! Raised for unreadable, malformed or unwritable files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! 17 significant digits, so the value parses back exactly; NaN is written as "NA".
std::string format_double(double x);
//! Strict numeric parse; "NA" yields NaN only when `allow_na` is set.
std::optional<double> parse_double(std::string_view text, bool allow_na = false);

/// Reads a comma-separated file with a header row into a Dataset.
///
/// The response is the column named `response_column`, or the last column when
/// none is given; every other column becomes a design column in file order.
/// Ragged rows, empty cells and non-numeric cells are errors that report the
/// 1-based line and column.
Dataset load_csv(const std::filesystem::path& path, const std::optional<std::string>& response_column = {},
                 Domain domain = Domain::target);

//! Writes x1..xd,y with full precision; load_csv reads it back exactly.
void write_csv(const Dataset& ds, const std::filesystem::path& path);

//! One replicate-level result line.
struct ResultRow {
  std::string method;
  int replicate = 0;
  double sse = 0.0;
  double mse = 0.0;
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct ResultsTable {
  std::vector<ResultRow> rows;
  std::vector<MethodSummary> summaries;
};

inline constexpr const char* kResultsHeader = "method,replicate,sse,mse,lambda0,lambda1,iterations,converged";
inline constexpr const char* kSummaryHeader = "method,n,failures,sse_mean,sse_stderr,mse_mean,mse_stderr";

ResultsTable to_results_table(const ReplicationResults& res);

//! Replicate rows under the fixed header.
void write_results(const ResultsTable& table, const std::filesystem::path& path);
//! Aggregate rows (mean / standard error per method).
void write_summary(const ResultsTable& table, const std::filesystem::path& path);
ResultsTable read_results(const std::filesystem::path& path);

//! Coefficient vector file: one value per line, optional header. "index,value" rows are also accepted.
Vector read_vector(const std::filesystem::path& path);

//! Writes text, creating parent directories; throws IoError on failure.
void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace cstl
