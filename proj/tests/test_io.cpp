#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "mdscale/io.hpp"
#include "testutil.hpp"

using namespace mdscale;
using testutil::random_matrix;

namespace {

const char* kDeGruijterBlock =
    "      KVP PvdA  VVD  ARP  CHU  CPN  PSP   BP\n"
    "PvdA 2.63\n"
    "VVD  2.27 3.72\n"
    "ARP  1.60 2.64 2.46\n"
    "CHU  1.80 3.22 1.97 0.20\n"
    "CPN  4.54 2.12 5.13 4.84 4.80\n"
    "PSP  3.73 1.59 4.55 3.73 4.08 1.08\n"
    "BP   4.18 4.22 3.90 4.28 3.96 3.34 3.88\n"
    "D66  3.17 2.47 1.67 3.13 3.04 4.42 3.36 4.36\n";

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_SUITE_BEGIN("io");

TEST_CASE("parse the labeled political-parties block") {
  std::istringstream in(kDeGruijterBlock);
  const ParsedMatrix parsed = parse_lower_triangle(in, "block");
  REQUIRE(parsed.values.rows() == 9);
  REQUIRE(parsed.labels.size() == 9);
  CHECK(parsed.labels.front() == "KVP");
  CHECK(parsed.labels.back() == "D66");
  CHECK(parsed.values(1, 0) == 2.63);  // (PvdA, KVP)
  CHECK(parsed.values(8, 7) == 4.36);  // (D66, BP)
  CHECK(parsed.values(0, 1) == 2.63);
  CHECK(parsed.values.diagonal().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single value yields a 2x2 matrix") {
  std::istringstream in("1.0\n");
  const ParsedMatrix parsed = parse_lower_triangle(in);
  REQUIRE(parsed.values.rows() == 2);
  CHECK(parsed.values(0, 1) == 1.0);
  CHECK(parsed.values(1, 0) == 1.0);
  CHECK(parsed.values(0, 0) == 0.0);
  CHECK(parsed.labels.empty());
}

TEST_CASE("write then parse is exact") {
  Matrix m = distance_matrix(random_matrix(6, 3, 13));
  std::ostringstream out;
  write_lower_triangle(out, m);
  std::istringstream in(out.str());
  const ParsedMatrix parsed = parse_lower_triangle(in);
  REQUIRE(parsed.values.rows() == 6);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      CHECK(parsed.values(i, j) == m(i, j));  // bitwise, %.17g round-trips
    }
  }
}

TEST_CASE("parse errors carry line numbers") {
  SUBCASE("ragged row") {
    std::istringstream in("1.0\n2.0\n");
    try {
      parse_lower_triangle(in, "t");
      FAIL("expected a parse error");
    } catch (const MatrixParseError& e) {
      CHECK(e.line_no == 2);
      CHECK(std::string(e.what()).find("expected 2") != std::string::npos);
    }
  }
  SUBCASE("negative entry") {
    std::istringstream in("1.0\n2.0 -3.0\n");
    try {
      parse_lower_triangle(in, "t");
      FAIL("expected a parse error");
    } catch (const MatrixParseError& e) {
      CHECK(e.line_no == 2);
      CHECK(std::string(e.what()).find("negative") != std::string::npos);
    }
  }
  SUBCASE("non-numeric token") {
    std::istringstream in("1.0\n2.0 zap\n");
    try {
      parse_lower_triangle(in, "t");
      FAIL("expected a parse error");
    } catch (const MatrixParseError& e) {
      CHECK(e.line_no == 2);
      CHECK(std::string(e.what()).find("zap") != std::string::npos);
    }
  }
}

TEST_CASE("similarity transform") {
  Matrix s = Matrix::Identity(3, 3);
  s(0, 1) = s(1, 0) = 1.0;
  s(0, 2) = s(2, 0) = 0.5;
  s(1, 2) = s(2, 1) = 0.25;
  const DissimilarityData data = similarity_to_dissimilarity(s, 3.0);
  CHECK(data.delta(0, 1) == 0.0);              // s = 1
  CHECK(data.delta(0, 2) == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(data.delta(1, 2) == doctest::Approx(0.421875).epsilon(1e-15));
  CHECK(data.delta.diagonal().cwiseAbs().maxCoeff() == 0.0);

  Matrix bad = s;
  bad(0, 1) = bad(1, 0) = 1.5;
  CHECK_THROWS_AS(similarity_to_dissimilarity(bad, 3.0), std::invalid_argument);
}

TEST_CASE("builtin political-parties dataset") {
  const Dataset dg = de_gruijter();
  CHECK(dg.data.n() == 9);
  CHECK(dg.labels.size() == 9);
  CHECK(dg.data.delta(1, 0) == 2.63);
  CHECK(dg.data.weights(1, 0) == 1.0);
}

TEST_CASE("color dataset checksum gate") {
  std::string reason;
  if (!ekman_available(&reason)) {
    MESSAGE("color data unavailable: ", reason);
    return;
  }
  const Dataset ek = ekman(3.0);
  CHECK(ek.data.n() == 14);
  // delta = (1 - 0.86)^3 for the closest pair of blues
  CHECK(ek.data.delta(1, 0) == doctest::Approx(0.002744).epsilon(1e-12));
}

TEST_CASE("trace file equals the verbose stream number for number") {
  const Dataset dg = de_gruijter();
  SolverConfig cfg;
  cfg.p = 3;
  cfg.itmax = 5;
  cfg.verbose = true;
  std::ostringstream log;
  cfg.log = &log;
  const SolverResult res = run(dg.data, cfg);

  std::ostringstream csv;
  write_trace_csv(csv, res.trace);

  std::istringstream verbose(log.str()), trace(csv.str());
  std::string vline, tline;
  std::getline(trace, tline);  // header
  while (std::getline(verbose, vline) && std::getline(trace, tline)) {
    // verbose: itel K loss S chan C rcnf R qcnf Q / csv: K,S,C,R,Q
    std::istringstream vs(vline);
    std::string tok;
    std::vector<std::string> vvals;
    while (vs >> tok) {
      vvals.push_back(tok);
    }
    REQUIRE(vvals.size() == 10);
    const std::string joined =
        vvals[1] + "," + vvals[3] + "," + vvals[5] + "," + vvals[7] + "," + vvals[9];
    CHECK(joined == tline);
  }
}

TEST_CASE("report serialization round-trips bit for bit") {
  const Dataset dg = de_gruijter();
  const auto out_path = temp_file("mdscale_test_report.json");
  const auto trace_path = temp_file("mdscale_test_report.trace.csv");
  std::ostringstream sink, errs;
  const int rc = run_cli({"--data", "degruijter", "--p", "3", "--out",
                          out_path.string(), "--trace", trace_path.string()},
                         sink, errs);
  REQUIRE(rc == 0);

  std::ifstream in(out_path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const RunReport report = report_from_json(text);
  CHECK(report.itel > 0);
  CHECK(report.n == 9);
  const RunReport again = report_from_json(report_to_json(report));
  CHECK(std::memcmp(&report.sigma, &again.sigma, sizeof(double)) == 0);
  CHECK(std::memcmp(&report.r_final, &again.r_final, sizeof(double)) == 0);
  CHECK(report.dgamma.eigenvalues == again.dgamma.eigenvalues);
  CHECK(report.certificate.eigenvalues == again.certificate.eigenvalues);
  CHECK(report.rates.q_final == again.rates.q_final);
  std::filesystem::remove(out_path);
  std::filesystem::remove(trace_path);
}

TEST_CASE("identical runs produce byte-identical reports modulo timing") {
  auto strip_timing = [](std::string text) {
    const auto pos = text.find("\"timing\"");
    REQUIRE(pos != std::string::npos);
    return text.substr(0, pos);
  };
  std::string texts[2];
  for (int i = 0; i < 2; ++i) {
    const auto out_path = temp_file("mdscale_det_" + std::to_string(i) + ".json");
    const auto trace_path = temp_file("mdscale_det_" + std::to_string(i) + ".csv");
    std::ostringstream sink, errs;
    const int rc = run_cli({"--data", "degruijter", "--p", "3", "--out",
                            out_path.string(), "--trace", trace_path.string()},
                           sink, errs);
    REQUIRE(rc == 0);
    std::ifstream in(out_path);
    std::stringstream buf;
    buf << in.rdbuf();
    texts[i] = buf.str();
    std::filesystem::remove(out_path);
    std::filesystem::remove(trace_path);
  }
  CHECK(strip_timing(texts[0]) == strip_timing(texts[1]));
}

TEST_CASE("cli report carries the nine-party reference numbers") {
  const auto out_path = temp_file("mdscale_dg_report.json");
  const auto trace_path = temp_file("mdscale_dg_report.csv");
  std::ostringstream sink, errs;
  const int rc = run_cli({"--data", "degruijter", "--p", "3", "--out",
                          out_path.string(), "--trace", trace_path.string()},
                         sink, errs);
  REQUIRE(rc == 0);
  std::ifstream in(out_path);
  std::stringstream buf;
  buf << in.rdbuf();
  const RunReport report = report_from_json(buf.str());
  CHECK(std::abs(report.itel - 778) <= 5);
  CHECK(std::abs(report.sigma - 0.003442194) <= 1e-8);
  CHECK(std::abs(report.dgamma.kappa - 0.9655054298) <= 1e-8);
  CHECK(std::abs(report.dpigamma.kappa - 0.9655054298) <= 1e-8);
  CHECK_FALSE(report.certificate.certified);
  CHECK(report.converged);
  CHECK(report.dropped_zero_distance_pairs == 0);

  // The rotated variant lands within a couple of iterations at the same
  // stress.
  const auto out2 = temp_file("mdscale_dg_pca_report.json");
  const auto trace2 = temp_file("mdscale_dg_pca_report.csv");
  std::ostringstream sink2, errs2;
  const int rc2 =
      run_cli({"--data", "degruijter", "--p", "3", "--pca", "--out",
               out2.string(), "--trace", trace2.string()},
              sink2, errs2);
  REQUIRE(rc2 == 0);
  std::ifstream in2(out2);
  std::stringstream buf2;
  buf2 << in2.rdbuf();
  const RunReport rotated = report_from_json(buf2.str());
  CHECK(std::abs(rotated.itel - 779) <= 2);
  CHECK(std::abs(rotated.sigma - report.sigma) <= 1e-12);
  std::filesystem::remove(out_path);
  std::filesystem::remove(trace_path);
  std::filesystem::remove(out2);
  std::filesystem::remove(trace2);
}

TEST_CASE("a capped run exits zero with the non-converged flag") {
  const auto out_path = temp_file("mdscale_capped_report.json");
  const auto trace_path = temp_file("mdscale_capped_report.csv");
  std::ostringstream sink, errs;
  const int rc = run_cli({"--data", "degruijter", "--p", "3", "--itmax", "5",
                          "--out", out_path.string(), "--trace",
                          trace_path.string()},
                         sink, errs);
  CHECK(rc == 0);
  std::ifstream in(out_path);
  std::stringstream buf;
  buf << in.rdbuf();
  const RunReport report = report_from_json(buf.str());
  CHECK_FALSE(report.converged);
  CHECK(report.itel == 5);
  std::filesystem::remove(out_path);
  std::filesystem::remove(trace_path);
}

TEST_CASE("cli rejects bad input with the data exit code") {
  const auto bad_path = temp_file("mdscale_bad_input.dat");
  {
    std::ofstream out(bad_path);
    out << "1.0\n2.0 oops\n";
  }
  std::ostringstream sink, errs;
  const int rc = run_cli({"--data", bad_path.string()}, sink, errs);
  CHECK(rc == 2);
  CHECK(errs.str().find("oops") != std::string::npos);
  std::filesystem::remove(bad_path);
}

TEST_CASE("cli accepts a weight file and init variants") {
  // Data: distances of a random 5-point planar set; weights: all ones with
  // one pair downweighted to zero (graph stays connected).
  Matrix x = random_matrix(5, 2, 131);
  const Matrix d = distance_matrix(x);
  Matrix w = Matrix::Ones(5, 5) - Matrix::Identity(5, 5);
  w(0, 1) = w(1, 0) = 0.0;
  const auto data_path = temp_file("mdscale_wdata.dat");
  const auto w_path = temp_file("mdscale_wfile.dat");
  {
    std::ofstream out(data_path);
    write_lower_triangle(out, d);
    std::ofstream wout(w_path);
    write_lower_triangle(wout, w);
  }
  const auto out_path = temp_file("mdscale_w_report.json");
  const auto trace_path = temp_file("mdscale_w_report.csv");

  std::ostringstream sink, errs;
  int rc = run_cli({"--data", data_path.string(), "--weights", w_path.string(),
                    "--p", "2", "--out", out_path.string(), "--trace",
                    trace_path.string()},
                   sink, errs);
  CHECK(rc == 0);

  rc = run_cli({"--data", data_path.string(), "--p", "2", "--init",
                "random:42", "--out", out_path.string(), "--trace",
                trace_path.string()},
               sink, errs);
  CHECK(rc == 0);

  // User-supplied init from a dense matrix file.
  const auto init_path = temp_file("mdscale_init.dat");
  {
    std::ofstream out(init_path);
    for (int i = 0; i < 5; ++i) {
      out << x(i, 0) << ' ' << x(i, 1) << '\n';
    }
  }
  rc = run_cli({"--data", data_path.string(), "--p", "2", "--init",
                "file:" + init_path.string(), "--out", out_path.string(),
                "--trace", trace_path.string()},
               sink, errs);
  CHECK(rc == 0);

  for (const auto& pth :
       {data_path, w_path, out_path, trace_path, init_path}) {
    std::filesystem::remove(pth);
  }
}

TEST_CASE("cli usage errors exit with code 1") {
  std::ostringstream sink, errs;
  CHECK(run_cli({"--no-such-flag"}, sink, errs) == 1);
  CHECK(run_cli({"--data", "degruijter", "--init", "bogus"}, sink, errs) == 1);
}

TEST_CASE("cli solves a perfect-fit instance end to end") {
  // Distances of a centered planar configuration, written to disk.
  Matrix x = random_matrix(5, 2, 111);
  x.rowwise() -= x.colwise().mean();
  const Matrix d = distance_matrix(x);
  const auto data_path = temp_file("mdscale_perfect.dat");
  {
    std::ofstream out(data_path);
    write_lower_triangle(out, d);
  }
  const auto out_path = temp_file("mdscale_perfect_report.json");
  const auto trace_path = temp_file("mdscale_perfect_report.csv");
  std::ostringstream sink, errs;
  const int rc = run_cli({"--data", data_path.string(), "--p", "2", "--out",
                          out_path.string(), "--trace", trace_path.string()},
                         sink, errs);
  REQUIRE(rc == 0);
  std::ifstream in(out_path);
  std::stringstream buf;
  buf << in.rdbuf();
  const RunReport report = report_from_json(buf.str());
  CHECK(report.sigma <= 1e-20);
  CHECK(report.certificate.certified);
  CHECK(report.converged);
  std::filesystem::remove(data_path);
  std::filesystem::remove(out_path);
  std::filesystem::remove(trace_path);
}

TEST_SUITE_END();
