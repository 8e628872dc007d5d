#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mdscale/io.hpp"

namespace mdscale {

namespace {

// De Gruijter (1967): dissimilarities between nine Dutch political parties.
const char* kDeGruijterTable =
    "      KVP PvdA  VVD  ARP  CHU  CPN  PSP   BP\n"
    "PvdA 2.63\n"
    "VVD  2.27 3.72\n"
    "ARP  1.60 2.64 2.46\n"
    "CHU  1.80 3.22 1.97 0.20\n"
    "CPN  4.54 2.12 5.13 4.84 4.80\n"
    "PSP  3.73 1.59 4.55 3.73 4.08 1.08\n"
    "BP   4.18 4.22 3.90 4.28 3.96 3.34 3.88\n"
    "D66  3.17 2.47 1.67 3.13 3.04 4.42 3.36 4.36\n";

const char* kEkmanLabels[] = {"434", "445", "465", "472", "490", "504", "537",
                              "555", "584", "600", "610", "628", "651", "674"};

}  // namespace

Dataset de_gruijter() {
  std::istringstream in{std::string(kDeGruijterTable)};
  ParsedMatrix parsed = parse_lower_triangle(in, "de_gruijter");
  Dataset out;
  out.name = "degruijter";
  out.data = dissimilarity_from_matrix(parsed.values);
  out.labels = std::move(parsed.labels);
  return out;
}

std::string ekman_data_path() {
  if (const char* env = std::getenv("MDSCALE_DATA_DIR")) {
    return std::string(env) + "/ekman.dat";
  }
#ifdef MDSCALE_DATA_DIR
  return std::string(MDSCALE_DATA_DIR) + "/ekman.dat";
#else
  return "data/ekman.dat";
#endif
}

std::uint64_t fnv1a_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool ekman_available(std::string* reason) {
  const std::string path = ekman_data_path();
  std::ifstream probe(path);
  if (!probe) {
    if (reason) *reason = "data file missing: " + path;
    return false;
  }
  probe.close();
  const std::uint64_t h = fnv1a_file(path);
  if (h != kEkmanChecksum) {
    if (reason) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "checksum mismatch: %016llx",
                    static_cast<unsigned long long>(h));
      *reason = path + " " + buf;
    }
    return false;
  }
  return true;
}

Dataset ekman(double exponent) {
  std::string reason;
  if (!ekman_available(&reason)) {
    throw std::runtime_error("ekman dataset unavailable: " + reason);
  }
  ParsedMatrix parsed = parse_lower_triangle_file(ekman_data_path());
  // The file stores similarities with a zero diagonal; restore the unit
  // diagonal the transform expects.
  Matrix s = parsed.values;
  s.diagonal().setOnes();
  Dataset out;
  out.name = "ekman";
  out.data = similarity_to_dissimilarity(s, exponent);
  out.labels.assign(std::begin(kEkmanLabels), std::end(kEkmanLabels));
  return out;
}

}  // namespace mdscale
