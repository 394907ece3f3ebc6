#include "hfot/io.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hfot/errors.hpp"

namespace hfot {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

namespace {

constexpr std::uint16_t kVersion = 1;

class Writer {
 public:
  template <class T>
  void put(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    bytes_.append(buf, sizeof(T));
  }
  void raw(const std::string& s) { bytes_ += s; }
  const std::string& bytes() const { return bytes_; }

 private:
  std::string bytes_;
};

class Reader {
 public:
  Reader(std::string bytes, std::string path) : bytes_(std::move(bytes)), path_(std::move(path)) {}

  template <class T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string raw(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw FormatError(path_ + ": truncated file");
  }
  std::string bytes_;
  std::string path_;
  std::size_t pos_ = 0;
};

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_bytes(const std::string& path, const std::string& bytes) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::string tmp = path + ".part";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw std::runtime_error("write failed for " + path);
    }
  }
  std::filesystem::rename(tmp, target);
}

void put_trailer(Writer& w, const nlohmann::json& meta) {
  const std::string text = meta.dump();
  w.put<std::uint64_t>(text.size());
  w.raw(text);
}

nlohmann::json get_trailer(Reader& r, const std::string& path) {
  const auto len = r.get<std::uint64_t>();
  const std::string text = r.raw(static_cast<std::size_t>(len));
  if (!r.done()) throw FormatError(path + ": trailing bytes after metadata");
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": bad metadata: " + e.what());
  }
}

void check_magic(Reader& r, const char* magic, const std::string& path) {
  if (r.raw(4) != magic) throw FormatError(path + ": bad magic, expected " + magic);
  const auto version = r.get<std::uint16_t>();
  if (version != kVersion) throw FormatError(path + ": unsupported version " + std::to_string(version));
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_sinogram(const std::string& path, const Sinogram& sino) {
  const SinogramGrid& g = sino.data.grid;
  Writer w;
  w.raw("HRTS");
  w.put<std::uint16_t>(kVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(g.n_s));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(g.n_theta));
  w.put<double>(sino.domain.r);
  w.put<double>(sino.domain.D);
  w.put<double>(sino.omega);
  for (const auto& z : sino.data.values) {
    w.put<double>(z.real());
    w.put<double>(z.imag());
  }
  put_trailer(w, sino.meta);
  write_bytes(path, w.bytes());
}

Sinogram read_sinogram(const std::string& path) {
  Reader r(read_bytes(path), path);
  check_magic(r, "HRTS", path);
  const auto ns = r.get<std::uint32_t>();
  const auto nt = r.get<std::uint32_t>();
  const double rad = r.get<double>();
  const double standoff = r.get<double>();
  const double omega = r.get<double>();
  if (ns == 0 || nt == 0 || ns > (1u << 16) || nt > (1u << 16)) throw FormatError(path + ": implausible grid size");
  Sinogram s;
  try {
    s.domain = DiskDomain(rad, standoff);
  } catch (const ConfigError& e) {
    throw FormatError(path + ": " + e.what());
  }
  s.omega = omega;
  s.data = ComplexSino(SinogramGrid(static_cast<int>(ns), static_cast<int>(nt), s.domain));
  for (auto& z : s.data.values) {
    const double re = r.get<double>();
    const double im = r.get<double>();
    z = {re, im};
  }
  s.meta = get_trailer(r, path);
  return s;
}

void write_grid(const std::string& path, const ScalarField& f, const nlohmann::json& meta) {
  Writer w;
  w.raw("HRTG");
  w.put<std::uint16_t>(kVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(f.lattice().n));
  w.put<double>(f.lattice().r);
  for (double v : f.values()) w.put<double>(v);
  put_trailer(w, meta);
  write_bytes(path, w.bytes());
}

ScalarField read_grid(const std::string& path, nlohmann::json* meta) {
  Reader r(read_bytes(path), path);
  check_magic(r, "HRTG", path);
  const auto n = r.get<std::uint32_t>();
  const double rad = r.get<double>();
  if (n == 0 || n > (1u << 14) || !(rad > 0.0)) throw FormatError(path + ": implausible lattice");
  ScalarField f(Lattice(static_cast<int>(n), rad));
  for (double& v : f.values()) v = r.get<double>();
  f.set_support_radius(rad);
  const nlohmann::json m = get_trailer(r, path);
  if (meta) *meta = m;
  return f;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_grid_csv(const std::string& path, const ScalarField& f) {
  const Lattice& lat = f.lattice();
  std::string out = "x,y,value\n";
  for (int iy = 0; iy < lat.nodes(); ++iy)
    for (int ix = 0; ix < lat.nodes(); ++ix) {
      out += format_double(lat.coord(ix));
      out += ',';
      out += format_double(lat.coord(iy));
      out += ',';
      out += format_double(f.at(ix, iy));
      out += '\n';
    }
  write_bytes(path, out);
}

void write_text(const std::string& path, const std::string& content) { write_bytes(path, content); }

std::string read_text(const std::string& path) { return read_bytes(path); }

}  // namespace hfot
