#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdscale/smacof.hpp"
#include "mdscale/spectrum.hpp"

// Data ingestion (lower-triangle matrix files), similarity transforms, the
// two bundled reference datasets, run reports, and the command-line driver.

namespace mdscale {

struct MatrixParseError : std::runtime_error {
  MatrixParseError(const std::string& origin, int line_no,
                   const std::string& detail);
  int line_no;
};

// Lower-triangle text format: n-1 rows, row k holding k entries, each row
// optionally prefixed by a non-numeric label; an optional leading header
// line of n-1 labels names the columns (first point through next-to-last).
struct ParsedMatrix {
  Matrix values;                    // full symmetric hollow matrix
  std::vector<std::string> labels;  // n labels, or empty
};

ParsedMatrix parse_lower_triangle(std::istream& in,
                                  const std::string& origin = "<stream>");
ParsedMatrix parse_lower_triangle_file(const std::string& path);

// Writes %.17g entries; with labels, mirrors the labeled layout above.
void write_lower_triangle(std::ostream& out, const Matrix& m,
                          const std::vector<std::string>& labels = {});

// Unit weights, hollow.
DissimilarityData dissimilarity_from_matrix(const Matrix& delta);

// delta_ij = (1 - s_ij)^exponent. Requires s symmetric with unit diagonal
// and entries in [0, 1].
DissimilarityData similarity_to_dissimilarity(const Matrix& s, double exponent);

struct Dataset {
  std::string name;
  DissimilarityData data;
  std::vector<std::string> labels;
};

// Dissimilarities between nine Dutch political parties, embedded verbatim.
Dataset de_gruijter();

// Color similarity ratings for 14 spectral hues, vendored as a data file
// and guarded by a checksum. ekman() applies the (1-s)^exponent transform.
std::string ekman_data_path();
std::uint64_t fnv1a_file(const std::string& path);
inline constexpr std::uint64_t kEkmanChecksum = 0x5b94949bd111d308ULL;
bool ekman_available(std::string* reason = nullptr);
Dataset ekman(double exponent = 3.0);

// Everything one solver run produces, serializable to JSON losslessly
// (doubles survive a write/read round trip bit for bit). Reports from
// identical inputs are byte-identical apart from the timing block.
struct RunReport {
  std::string data_arg;
  std::string weights_arg;
  int p = 2;
  double eps = 1e-15;
  int itmax = 10000;
  bool pca = false;
  std::string init = "torgerson";
  double exponent = 3.0;

  std::string dataset_name;
  int n = 0;
  bool similarity_transform = false;
  std::string checksum;  // fnv1a-64 hex of the source file, empty if inline

  int itel = 0;
  bool converged = false;
  double sigma = 0.0;
  double rho = 0.0;
  double eta2 = 0.0;
  double lambda = 0.0;
  double change_final = 0.0;
  double r_final = 0.0;
  std::optional<double> q_final;
  int dropped_zero_distance_pairs = 0;
  bool pca_gap_warning = false;

  SpectrumReport dgamma;
  SpectrumReport dpigamma;
  GlobalMinCertificate certificate;
  RateEstimates rates;

  double solve_ms = 0.0;
  double total_ms = 0.0;
};

std::string report_to_json(const RunReport& report);
RunReport report_from_json(const std::string& text);

void write_trace_csv(std::ostream& out,
                     const std::vector<IterationRecord>& trace);

// Exit codes: 0 success (a non-converged run is flagged in the report, not
// an error), 1 usage, 2 data error.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace mdscale
