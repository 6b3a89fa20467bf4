#include "krf/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace krf {

namespace fs = std::filesystem;

namespace {

void ensure_little_endian_copy(const double* src, std::size_t count,
                               std::vector<unsigned char>& buf) {
  buf.resize(count * 8);
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(buf.data(), src, count * 8);
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      std::uint64_t bits;
      std::memcpy(&bits, src + i, 8);
      for (int b = 0; b < 8; ++b) buf[8 * i + b] = (bits >> (8 * b)) & 0xff;
    }
  }
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void write_checkpoint(const std::string& path, const std::string& kind, double t,
                      const ScalarField& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << "KRF1 " << kind << " " << field.n() << " " << fmt(t) << "\n";
  std::vector<unsigned char> buf;
  ensure_little_endian_copy(field.data().data(), field.size(), buf);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string magic, kind;
  int n = 0;
  double t = 0.0;
  hs >> magic >> kind >> n >> t;
  if (magic != "KRF1" || n <= 0)
    throw std::runtime_error("bad checkpoint header in " + path + ": '" + header + "'");
  Checkpoint cp;
  cp.kind = kind;
  cp.t = t;
  TorusGrid g(n);
  std::vector<double> values(g.size());
  std::vector<unsigned char> buf(g.size() * 8);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!in) throw std::runtime_error("truncated checkpoint: " + path);
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(values.data(), buf.data(), buf.size());
  } else {
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::uint64_t bits = 0;
      for (int b = 0; b < 8; ++b) bits |= std::uint64_t(buf[8 * i + b]) << (8 * b);
      std::memcpy(&values[i], &bits, 8);
    }
  }
  cp.field = ScalarField(g, std::move(values));
  return cp;
}

void write_diagnostics_csv(const std::string& path,
                           const std::vector<DiagnosticsRow>& rows,
                           const std::string& config_hash) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# config=" << config_hash << "\n";
  out << "t,phi_min,phi_max,area_err,M,I2,B_plus,B_minus,D2,Gamma\n";
  for (const auto& r : rows)
    out << fmt(r.t) << "," << fmt(r.phi_min) << "," << fmt(r.phi_max) << ","
        << fmt(r.area_err) << "," << fmt(r.mass) << "," << fmt(r.i2) << ","
        << fmt(r.b_plus) << "," << fmt(r.b_minus) << "," << fmt(r.d2) << ","
        << fmt(r.gamma) << "\n";
}

void write_distances_csv(const std::string& path,
                         const std::vector<DistanceRecord>& records,
                         const std::string& config_hash) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# config=" << config_hash << "\n";
  out << "source_x,source_y,target_x,target_y,d_value,method,metric_tag,t_or_limit\n";
  for (const auto& r : records)
    out << fmt(r.source.x) << "," << fmt(r.source.y) << "," << fmt(r.target.x) << ","
        << fmt(r.target.y) << "," << fmt(r.value) << "," << r.method << ","
        << r.metric_tag << "," << (r.t_or_limit < 0 ? std::string("limit") : fmt(r.t_or_limit))
        << "\n";
}

void write_holder_csv(const std::string& path, const std::vector<HolderRecord>& fits,
                      const std::string& config_hash) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# config=" << config_hash << "\n";
  out << "exponent,constant,residual,direction\n";
  for (const auto& f : fits)
    out << fmt(f.exponent) << "," << fmt(f.constant) << "," << fmt(f.residual) << ","
        << f.direction << "\n";
}

void write_report_csv(const std::string& path, const EstimateReport& report,
                      const std::string& config_hash) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# config=" << config_hash << "\n";
  out << "check,scenario,verdict,value,tolerance,provenance,detail\n";
  for (const auto& r : report)
    out << r.id << "," << r.scenario << "," << (r.pass ? "pass" : "fail") << ","
        << fmt(r.value) << "," << fmt(r.tolerance) << "," << r.provenance << ",\""
        << r.detail << "\"\n";
}

void write_pgm(const std::string& path, const ScalarField& field) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  const double lo = field.min(), hi = field.max();
  const double span = (hi > lo) ? hi - lo : 1.0;
  const int n = field.n();
  out << "P2\n# torus field, min=" << fmt(lo) << " max=" << fmt(hi) << "\n"
      << n << " " << n << "\n65535\n";
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v = static_cast<int>(65535.0 * (field.at(i, j) - lo) / span + 0.5);
      out << v << (i + 1 == n ? "" : " ");
    }
    out << "\n";
  }
}

void write_field_csv(const std::string& path, const ScalarField& field,
                     const std::string& config_hash) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "# config=" << config_hash << "\n";
  out << "x,y,value\n";
  const int n = field.n();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      out << fmt(i * field.grid().h()) << "," << fmt(j * field.grid().h()) << ","
          << fmt(field.at(i, j)) << "\n";
}

void claim_output_dir(const std::string& dir, const std::string& config_hash) {
  fs::create_directories(dir);
  const fs::path manifest = fs::path(dir) / "manifest.txt";
  if (fs::exists(manifest)) {
    std::ifstream in(manifest);
    std::string key, hash;
    in >> key >> hash;
    if (key != "config_hash" || hash.empty())
      throw std::runtime_error("corrupt manifest in " + dir);
    if (hash != config_hash)
      throw std::runtime_error("output directory " + dir +
                               " belongs to a different config (hash " + hash +
                               " != " + config_hash + "); refusing mixed provenance");
    return;  // idempotent overwrite
  }
  std::ofstream out(manifest);
  out << "config_hash " << config_hash << "\n";
}

void record_artifact(const std::string& dir, const std::string& filename) {
  std::ofstream out(fs::path(dir) / "manifest.txt", std::ios::app);
  out << "file " << filename << "\n";
}

}  // namespace krf
