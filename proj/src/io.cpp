#include "sli/io.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace sli::io {

namespace {

std::ofstream open_out(const std::filesystem::path& file, bool binary = false) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot write '" + file.string() + "'");
  return out;
}

template <class T>
void put_le(std::ostream& out, T v) {
  std::array<char, sizeof(T)> buf{};
  for (std::size_t k = 0; k < sizeof(T); ++k) buf[k] = static_cast<char>((v >> (8 * k)) & 0xff);
  out.write(buf.data(), buf.size());
}

template <class T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> buf{};
  in.read(reinterpret_cast<char*>(buf.data()), buf.size());
  if (!in) throw std::runtime_error("histogram file truncated");
  T v = 0;
  for (std::size_t k = 0; k < sizeof(T); ++k) v |= static_cast<T>(buf[k]) << (8 * k);
  return v;
}

constexpr std::uint32_t kHistogramVersion = 1;

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_paths_csv(const std::filesystem::path& file,
                     std::span<const std::vector<PathRecord>> replications) {
  auto out = open_out(file);
  out << "replication,particle,jump_time\n";
  for (std::size_t r = 0; r < replications.size(); ++r) {
    const auto& paths = replications[r];
    for (std::size_t i = 0; i < paths.size(); ++i) {
      for (double t : paths[i].jump_times) out << r << ',' << i << ',' << format_double(t) << '\n';
    }
  }
}

void write_pmf_csv(const std::filesystem::path& file, const PmfEstimate& pmf) {
  auto out = open_out(file);
  out << "bin,value,stderr\n";
  for (std::size_t k = 0; k < pmf.probs.size(); ++k) {
    out << k << ',' << format_double(pmf.probs[k]) << ','
        << format_double(k < pmf.std_error.size() ? pmf.std_error[k] : 0.0) << '\n';
  }
}

void write_pmf_csv(const std::filesystem::path& file, std::span<const double> probs) {
  auto out = open_out(file);
  out << "bin,value,stderr\n";
  for (std::size_t k = 0; k < probs.size(); ++k) {
    out << k << ',' << format_double(probs[k]) << ",0\n";
  }
}

void write_cdf_csv(const std::filesystem::path& file, std::span<const double> thresholds,
                   std::span<const ScalarEstimate> values) {
  if (thresholds.size() != values.size()) throw std::invalid_argument("write_cdf_csv: size mismatch");
  auto out = open_out(file);
  out << "bin,value,stderr\n";
  for (std::size_t k = 0; k < values.size(); ++k) {
    out << format_double(thresholds[k]) << ',' << format_double(values[k].value) << ','
        << format_double(values[k].std_error) << '\n';
  }
}

void write_fp_csv(const std::filesystem::path& file, std::span<const FpState> snapshots) {
  auto out = open_out(file);
  out << "t,i,j,P\n";
  for (const auto& s : snapshots) {
    const std::string t = format_double(s.t);
    for (int i = 0; i <= s.m; ++i) {
      for (int y = 0; y < s.j; ++y) out << t << ',' << i << ',' << y << ',' << format_double(s.at(i, y)) << '\n';
    }
  }
}

void write_convergence_csv(const std::filesystem::path& file, std::span<const StudyRow> rows) {
  auto out = open_out(file);
  out << "N,mse,n_reps\n";
  for (const auto& r : rows) out << r.n << ',' << format_double(r.mse) << ',' << r.reps << '\n';
}

void write_sample_csv(const std::filesystem::path& file, std::span<const double> values) {
  auto out = open_out(file);
  out << "index,value\n";
  for (std::size_t k = 0; k < values.size(); ++k) out << k << ',' << format_double(values[k]) << '\n';
}

void write_json(const std::filesystem::path& file, const nlohmann::json& doc) {
  auto out = open_out(file);
  out << doc.dump(2) << '\n';
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  auto out = open_out(file);
  out << text;
}

TerminalHistogram histogram_of(std::span<const PathRecord> paths, int m) {
  TerminalHistogram h;
  h.m = static_cast<std::uint32_t>(m);
  h.counts.assign(static_cast<std::size_t>(m) + 1, 0);
  for (const auto& p : paths) {
    if (p.x_terminal < 0 || p.x_terminal > m) throw std::out_of_range("terminal level outside {0..M}");
    ++h.counts[static_cast<std::size_t>(p.x_terminal)];
    ++h.n;
  }
  return h;
}

void write_histogram(const std::filesystem::path& file, const TerminalHistogram& h) {
  if (h.counts.size() != static_cast<std::size_t>(h.m) + 1) {
    throw std::invalid_argument("write_histogram: counts must have m + 1 entries");
  }
  auto out = open_out(file, true);
  out.write("SLIH", 4);
  put_le<std::uint32_t>(out, kHistogramVersion);
  put_le<std::uint32_t>(out, h.m);
  put_le<std::uint32_t>(out, 0);
  put_le<std::uint64_t>(out, h.n);
  for (auto c : h.counts) put_le<std::uint64_t>(out, c);
}

TerminalHistogram read_histogram(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + file.string() + "'");
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "SLIH") throw std::runtime_error("not a histogram file");
  if (get_le<std::uint32_t>(in) != kHistogramVersion) {
    throw std::runtime_error("unsupported histogram version");
  }
  TerminalHistogram h;
  h.m = get_le<std::uint32_t>(in);
  get_le<std::uint32_t>(in);
  h.n = get_le<std::uint64_t>(in);
  h.counts.resize(static_cast<std::size_t>(h.m) + 1);
  for (auto& c : h.counts) c = get_le<std::uint64_t>(in);
  return h;
}

}  // namespace sli::io
