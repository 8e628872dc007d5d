#include "mdscale/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mdscale/jacobian.hpp"

namespace mdscale {

namespace {

using ordered_json = nlohmann::ordered_json;

bool parse_double(const std::string& tok, double* value) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, *value);
  return ec == std::errc() && ptr == last && std::isfinite(*value);
}

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

MatrixParseError::MatrixParseError(const std::string& origin, int line,
                                   const std::string& detail)
    : std::runtime_error(origin + ":" + std::to_string(line) + ": " + detail),
      line_no(line) {}

ParsedMatrix parse_lower_triangle(std::istream& in, const std::string& origin) {
  std::vector<std::string> header;
  std::vector<std::string> row_labels;
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  bool saw_data = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = tokenize(line);
    if (toks.empty()) continue;

    double ignored;
    const bool all_labels = std::none_of(
        toks.begin(), toks.end(),
        [&](const std::string& t) { return parse_double(t, &ignored); });
    if (all_labels && !saw_data && header.empty()) {
      header = toks;
      continue;
    }

    std::size_t start = 0;
    std::string label;
    if (!parse_double(toks[0], &ignored)) {
      label = toks[0];
      start = 1;
    }
    const std::size_t row_index = rows.size() + 1;  // row k holds k entries
    if (toks.size() - start != row_index) {
      throw MatrixParseError(
          origin, line_no,
          "row " + std::to_string(row_index) + ": expected " +
              std::to_string(row_index) + " entries, got " +
              std::to_string(toks.size() - start));
    }
    std::vector<double> vals;
    vals.reserve(row_index);
    for (std::size_t i = start; i < toks.size(); ++i) {
      double v;
      if (!parse_double(toks[i], &v)) {
        throw MatrixParseError(origin, line_no,
                               "non-numeric token '" + toks[i] + "'");
      }
      if (v < 0.0) {
        throw MatrixParseError(origin, line_no,
                               "negative entry " + toks[i]);
      }
      vals.push_back(v);
    }
    if (!label.empty()) {
      if (!row_labels.empty() && row_labels.size() != rows.size()) {
        throw MatrixParseError(origin, line_no, "inconsistent row labeling");
      }
      row_labels.push_back(label);
    } else if (!row_labels.empty()) {
      throw MatrixParseError(origin, line_no, "inconsistent row labeling");
    }
    rows.push_back(std::move(vals));
    saw_data = true;
  }
  if (rows.empty()) {
    throw MatrixParseError(origin, line_no, "no data rows");
  }
  const int n = static_cast<int>(rows.size()) + 1;
  if (!header.empty() && static_cast<int>(header.size()) != n - 1) {
    throw MatrixParseError(origin, 1,
                           "header: expected " + std::to_string(n - 1) +
                               " labels, got " + std::to_string(header.size()));
  }

  ParsedMatrix out;
  out.values = Matrix::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      out.values(i, j) = out.values(j, i) = rows[i - 1][j];
    }
  }
  if (!row_labels.empty()) {
    out.labels.reserve(n);
    out.labels.push_back(header.empty() ? std::string() : header.front());
    out.labels.insert(out.labels.end(), row_labels.begin(), row_labels.end());
  }
  return out;
}

ParsedMatrix parse_lower_triangle_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MatrixParseError(path, 0, "cannot open file");
  return parse_lower_triangle(in, path);
}

void write_lower_triangle(std::ostream& out, const Matrix& m,
                          const std::vector<std::string>& labels) {
  const int n = static_cast<int>(m.rows());
  const bool labeled = static_cast<int>(labels.size()) == n;
  if (labeled) {
    for (int j = 0; j < n - 1; ++j) out << (j ? " " : "") << labels[j];
    out << '\n';
  }
  for (int i = 1; i < n; ++i) {
    if (labeled) out << labels[i] << ' ';
    for (int j = 0; j < i; ++j) {
      out << (j ? " " : "") << format_g17(m(i, j));
    }
    out << '\n';
  }
}

DissimilarityData dissimilarity_from_matrix(const Matrix& delta) {
  const int n = static_cast<int>(delta.rows());
  DissimilarityData data;
  data.delta = delta;
  data.weights = Matrix::Ones(n, n) - Matrix::Identity(n, n);
  validate(data);
  return data;
}

DissimilarityData similarity_to_dissimilarity(const Matrix& s, double exponent) {
  const int n = static_cast<int>(s.rows());
  if (s.cols() != n) throw std::invalid_argument("similarity matrix must be square");
  for (int i = 0; i < n; ++i) {
    if (s(i, i) != 1.0) {
      throw std::invalid_argument("similarity matrix must have a unit diagonal");
    }
    for (int j = 0; j < n; ++j) {
      if (s(i, j) != s(j, i)) {
        throw std::invalid_argument("similarity matrix must be symmetric");
      }
      if (s(i, j) < 0.0 || s(i, j) > 1.0) {
        throw std::invalid_argument("similarity entries must lie in [0, 1]");
      }
    }
  }
  DissimilarityData data;
  data.delta.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      data.delta(i, j) = i == j ? 0.0 : std::pow(1.0 - s(i, j), exponent);
    }
  }
  data.weights = Matrix::Ones(n, n) - Matrix::Identity(n, n);
  validate(data);
  return data;
}

namespace {

ordered_json spectrum_to_json(const SpectrumReport& r) {
  return ordered_json{{"eigenvalues", r.eigenvalues},
                      {"n_unit", r.n_unit},
                      {"n_zero", r.n_zero},
                      {"kappa", r.kappa},
                      {"unit_tol", r.unit_tol},
                      {"zero_tol", r.zero_tol},
                      {"classification", to_string(r.classification)}};
}

SpectrumReport spectrum_from_json(const ordered_json& j) {
  SpectrumReport r;
  r.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
  r.n_unit = j.at("n_unit").get<int>();
  r.n_zero = j.at("n_zero").get<int>();
  r.kappa = j.at("kappa").get<double>();
  r.unit_tol = j.at("unit_tol").get<double>();
  r.zero_tol = j.at("zero_tol").get<double>();
  const std::string c = j.at("classification").get<std::string>();
  r.classification = c == "attracting-minimum"
                         ? StationaryClass::AttractingMinimum
                         : (c == "saddle-or-repulsing"
                                ? StationaryClass::SaddleOrRepulsing
                                : StationaryClass::Indeterminate);
  return r;
}

}  // namespace

std::string report_to_json(const RunReport& r) {
  ordered_json j;
  j["config"] = ordered_json{{"data", r.data_arg},   {"weights", r.weights_arg},
                             {"p", r.p},             {"eps", r.eps},
                             {"itmax", r.itmax},     {"pca", r.pca},
                             {"init", r.init},       {"exponent", r.exponent}};
  j["dataset"] = ordered_json{{"name", r.dataset_name},
                              {"n", r.n},
                              {"similarity_transform", r.similarity_transform},
                              {"checksum", r.checksum}};
  ordered_json res{{"itel", r.itel},
                   {"converged", r.converged},
                   {"sigma", r.sigma},
                   {"rho", r.rho},
                   {"eta2", r.eta2},
                   {"lambda", r.lambda},
                   {"change_final", r.change_final},
                   {"r_final", r.r_final},
                   {"q_final", nullptr},
                   {"dropped_zero_distance_pairs", r.dropped_zero_distance_pairs},
                   {"pca_gap_warning", r.pca_gap_warning}};
  if (r.q_final) res["q_final"] = *r.q_final;
  j["result"] = std::move(res);
  j["spectra"] = ordered_json{{"dgamma", spectrum_to_json(r.dgamma)},
                              {"dpigamma", spectrum_to_json(r.dpigamma)}};
  j["certificate"] = ordered_json{{"eigenvalues", r.certificate.eigenvalues},
                                  {"certified", r.certificate.certified}};
  j["rates"] = ordered_json{{"r_final", r.rates.r_final},
                            {"q_final", r.rates.q_final},
                            {"q_liminf_proxy", r.rates.q_liminf_proxy},
                            {"r_limsup_proxy", r.rates.r_limsup_proxy},
                            {"window", r.rates.window}};
  j["timing"] = ordered_json{{"solve_ms", r.solve_ms}, {"total_ms", r.total_ms}};
  return j.dump(2) + "\n";
}

RunReport report_from_json(const std::string& text) {
  const ordered_json j = ordered_json::parse(text);
  RunReport r;
  const auto& c = j.at("config");
  r.data_arg = c.at("data").get<std::string>();
  r.weights_arg = c.at("weights").get<std::string>();
  r.p = c.at("p").get<int>();
  r.eps = c.at("eps").get<double>();
  r.itmax = c.at("itmax").get<int>();
  r.pca = c.at("pca").get<bool>();
  r.init = c.at("init").get<std::string>();
  r.exponent = c.at("exponent").get<double>();
  const auto& d = j.at("dataset");
  r.dataset_name = d.at("name").get<std::string>();
  r.n = d.at("n").get<int>();
  r.similarity_transform = d.at("similarity_transform").get<bool>();
  r.checksum = d.at("checksum").get<std::string>();
  const auto& res = j.at("result");
  r.itel = res.at("itel").get<int>();
  r.converged = res.at("converged").get<bool>();
  r.sigma = res.at("sigma").get<double>();
  r.rho = res.at("rho").get<double>();
  r.eta2 = res.at("eta2").get<double>();
  r.lambda = res.at("lambda").get<double>();
  r.change_final = res.at("change_final").get<double>();
  r.r_final = res.at("r_final").get<double>();
  if (!res.at("q_final").is_null()) r.q_final = res.at("q_final").get<double>();
  r.dropped_zero_distance_pairs = res.at("dropped_zero_distance_pairs").get<int>();
  r.pca_gap_warning = res.at("pca_gap_warning").get<bool>();
  r.dgamma = spectrum_from_json(j.at("spectra").at("dgamma"));
  r.dpigamma = spectrum_from_json(j.at("spectra").at("dpigamma"));
  r.certificate.eigenvalues =
      j.at("certificate").at("eigenvalues").get<std::vector<double>>();
  r.certificate.certified = j.at("certificate").at("certified").get<bool>();
  const auto& rates = j.at("rates");
  r.rates.r_final = rates.at("r_final").get<double>();
  r.rates.q_final = rates.at("q_final").get<double>();
  r.rates.q_liminf_proxy = rates.at("q_liminf_proxy").get<double>();
  r.rates.r_limsup_proxy = rates.at("r_limsup_proxy").get<double>();
  r.rates.window = rates.at("window").get<int>();
  const auto& t = j.at("timing");
  r.solve_ms = t.at("solve_ms").get<double>();
  r.total_ms = t.at("total_ms").get<double>();
  return r;
}

void write_trace_csv(std::ostream& out,
                     const std::vector<IterationRecord>& trace) {
  out << "k,sigma,change,r,q\n";
  for (const auto& rec : trace) out << format_trace_fields(rec) << '\n';
}

namespace {

Matrix read_dense_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto toks = tokenize(line);
    if (toks.empty()) continue;
    std::vector<double> vals;
    for (const auto& t : toks) {
      double v;
      if (!parse_double(t, &v)) {
        throw std::runtime_error(path + ": non-numeric token '" + t + "'");
      }
      vals.push_back(v);
    }
    if (!rows.empty() && vals.size() != rows.front().size()) {
      throw std::runtime_error(path + ": ragged matrix rows");
    }
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw std::runtime_error(path + ": empty matrix");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows.front().size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"metric least-squares multidimensional scaling with "
               "convergence diagnostics"};
  std::string data_arg, weights_arg, init_arg = "torgerson";
  std::string out_path = "mdscale_report.json", trace_path;
  int p = 2, itmax = 10000;
  double eps = 1e-15, exponent = 3.0;
  bool pca = false, verbose = false, similarity = false;

  app.add_option("--data", data_arg,
                 "lower-triangle file, or builtin: degruijter | ekman")
      ->required();
  app.add_option("--weights", weights_arg, "optional lower-triangle weight file");
  app.add_option("--p", p, "embedding dimension");
  app.add_option("--eps", eps, "stop when the configuration change drops below this");
  app.add_option("--itmax", itmax, "iteration cap");
  app.add_flag("--pca", pca, "rotate every iterate to principal axes");
  app.add_flag("--verbose", verbose, "print one line per iteration");
  app.add_option("--init", init_arg, "torgerson | random:<seed> | file:<path>");
  app.add_flag("--similarity", similarity,
               "treat --data file as similarities in [0,1]");
  app.add_option("--exponent", exponent,
                 "similarity transform exponent for (1-s)^e");
  app.add_option("--out", out_path, "report path");
  app.add_option("--trace", trace_path,
                 "trace csv path (default: report path with .trace.csv)");

  std::vector<const char*> argv;
  argv.push_back("mdscale");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return 1;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    RunReport report;
    report.data_arg = data_arg;
    report.weights_arg = weights_arg;
    report.p = p;
    report.eps = eps;
    report.itmax = itmax;
    report.pca = pca;
    report.init = init_arg;
    report.exponent = exponent;

    Dataset dataset;
    if (data_arg == "degruijter") {
      dataset = de_gruijter();
    } else if (data_arg == "ekman") {
      dataset = ekman(exponent);
      report.similarity_transform = true;
      report.checksum = hex64(fnv1a_file(ekman_data_path()));
    } else {
      ParsedMatrix parsed = parse_lower_triangle_file(data_arg);
      dataset.name = std::filesystem::path(data_arg).stem().string();
      dataset.labels = std::move(parsed.labels);
      if (similarity) {
        Matrix s = parsed.values;
        s.diagonal().setOnes();
        dataset.data = similarity_to_dissimilarity(s, exponent);
        report.similarity_transform = true;
      } else {
        dataset.data = dissimilarity_from_matrix(parsed.values);
      }
      report.checksum = hex64(fnv1a_file(data_arg));
    }
    if (!weights_arg.empty()) {
      ParsedMatrix wm = parse_lower_triangle_file(weights_arg);
      if (wm.values.rows() != dataset.data.delta.rows()) {
        throw std::invalid_argument("weight matrix size does not match data");
      }
      dataset.data.weights = wm.values;
      validate(dataset.data);
    }
    report.dataset_name = dataset.name;
    report.n = dataset.data.n();

    SolverConfig cfg;
    cfg.p = p;
    cfg.eps = eps;
    cfg.itmax = itmax;
    cfg.pca = pca;
    cfg.verbose = verbose;
    cfg.log = &out;
    if (init_arg == "torgerson") {
      cfg.init = InitKind::Torgerson;
    } else if (init_arg.rfind("random:", 0) == 0) {
      cfg.init = InitKind::Random;
      cfg.seed = std::stoull(init_arg.substr(7));
    } else if (init_arg.rfind("file:", 0) == 0) {
      cfg.init = InitKind::UserSupplied;
      cfg.init_config = read_dense_matrix(init_arg.substr(5));
    } else {
      err << "error: unknown --init '" << init_arg << "'\n";
      return 1;
    }

    const auto s0 = std::chrono::steady_clock::now();
    const SolverResult result = run(dataset.data, cfg);
    const auto s1 = std::chrono::steady_clock::now();

    report.itel = result.itel;
    report.converged = result.converged;
    report.sigma = result.stress_final.sigma;
    report.rho = result.stress_final.rho;
    report.eta2 = result.stress_final.eta2;
    report.lambda = result.stress_final.lambda;
    report.change_final = result.change_final;
    report.r_final = result.r_final;
    report.q_final = result.q_final;
    report.dropped_zero_distance_pairs = result.dropped_zero_distance_pairs;
    report.pca_gap_warning = result.pca_gap_warning;

    // Jacobian spectra and the certificate are fixed-point diagnostics;
    // a capped run is flagged in the report and skips them.
    if (result.converged) {
      const DissimilarityData norm = normalize(dataset.data);
      const LaplacianPair lap = build_laplacian_pair(norm);
      report.dgamma = analyze_jacobian(d_gamma(norm, result.x_final), p);
      // The composite map's spectrum is meaningful at the principal-axes
      // position, a fixed point of both maps.
      const Matrix x_pi = pca_rotate(result.x_final);
      report.dpigamma = analyze_jacobian(d_pi_gamma(norm, x_pi), p);
      report.certificate = vplus_b_spectrum(norm, lap, result.x_final);
    }
    if (result.trace.size() >= 2) {
      report.rates = empirical_rates(result.trace);
    }
    report.solve_ms =
        std::chrono::duration<double, std::milli>(s1 - s0).count();
    report.total_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();

    if (trace_path.empty()) {
      trace_path = std::filesystem::path(out_path)
                       .replace_extension(".trace.csv")
                       .string();
    }
    {
      std::ofstream rf(out_path);
      if (!rf) throw std::runtime_error("cannot write " + out_path);
      rf << report_to_json(report);
      std::ofstream tf(trace_path);
      if (!tf) throw std::runtime_error("cannot write " + trace_path);
      write_trace_csv(tf, result.trace);
    }

    out << "dataset " << report.dataset_name << " n " << report.n << " p " << p
        << (pca ? " pca" : "") << '\n';
    out << "itel " << report.itel << " converged "
        << (report.converged ? "true" : "false") << " sigma "
        << format_g17(report.sigma) << '\n';
    out << "kappa " << format_g17(report.dgamma.kappa) << " classification "
        << to_string(report.dgamma.classification) << '\n';
    out << "certified " << (report.certificate.certified ? "true" : "false")
        << '\n';
    out << "report " << out_path << " trace " << trace_path << '\n';
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace mdscale
