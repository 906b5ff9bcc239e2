#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "okpf/error.hpp"
#include "okpf/io.hpp"

namespace okpf {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char magic[4] = {'O', 'K', 'P', 'F'};

template <class T>
void put(std::string& buf, T x) {
  char b[sizeof(T)];
  std::memcpy(b, &x, sizeof(T));
  buf.append(b, sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}

  template <class T>
  T get(const char* what) {
    if (data_.size() - pos_ < sizeof(T))
      throw CorruptFileError(pos_, std::string("checkpoint truncated reading ") + what + " at offset " +
                                       std::to_string(pos_));
    T x;
    std::memcpy(&x, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return x;
  }

  void doubles(std::vector<double>& out, const char* what) {
    const std::size_t bytes = out.size() * sizeof(double);
    if (data_.size() - pos_ < bytes)
      throw CorruptFileError(pos_, std::string("checkpoint truncated reading ") + what + " at offset " +
                                       std::to_string(pos_));
    std::memcpy(out.data(), data_.data() + pos_, bytes);
    pos_ += bytes;
  }

  std::size_t pos() const { return pos_; }
  std::size_t size() const { return data_.size(); }

 private:
  std::string data_;
  std::size_t pos_ = 0;
};

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const RunState& s) {
  require_same_grid(s.u, s.v);
  const auto& g = s.u.grid;
  std::string buf(magic, 4);
  put<std::uint32_t>(buf, checkpoint_version);
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(g.dim));
  for (int a = 0; a < g.dim; ++a) put<std::uint32_t>(buf, static_cast<std::uint32_t>(g.points[a]));
  for (int a = 0; a < g.dim; ++a) put<double>(buf, g.lengths[a]);
  put<double>(buf, s.time);
  put<std::uint64_t>(buf, s.step);
  buf.append(reinterpret_cast<const char*>(s.u.values.data()), s.u.size() * sizeof(double));
  buf.append(reinterpret_cast<const char*>(s.v.values.data()), s.v.size() * sizeof(double));

  const auto tmp = std::filesystem::path(path).concat(".tmp");
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(Errc::io, "cannot open " + tmp.string() + " for writing");
    os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!os) throw Error(Errc::io, "write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(Errc::io, "cannot move checkpoint into place: " + ec.message());
}

RunState read_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(Errc::io, "cannot open " + path.string());
  Reader r(std::string(std::istreambuf_iterator<char>(is), {}));

  char m[4];
  for (char& c : m) c = r.get<char>("magic");
  if (std::memcmp(m, magic, 4) != 0) throw CorruptFileError(0, "bad magic at offset 0");
  const std::size_t vpos = r.pos();
  const auto version = r.get<std::uint32_t>("version");
  if (version != checkpoint_version)
    throw Error(Errc::unsupported_version, "unsupported checkpoint version " + std::to_string(version) +
                                               " at offset " + std::to_string(vpos));
  const std::size_t dpos = r.pos();
  const auto dim = r.get<std::uint32_t>("dim");
  if (dim != 2 && dim != 3) throw CorruptFileError(dpos, "bad dimension at offset " + std::to_string(dpos));

  GridSpec g;
  g.dim = static_cast<int>(dim);
  g.points = {1, 1, 1};
  g.lengths = {1.0, 1.0, 1.0};
  for (unsigned a = 0; a < dim; ++a) {
    const std::size_t at = r.pos();
    const auto n = r.get<std::uint32_t>("counts");
    if (n < 4 || n % 2 != 0 || n > (1u << 16))
      throw CorruptFileError(at, "bad grid count at offset " + std::to_string(at));
    g.points[a] = static_cast<int>(n);
  }
  for (unsigned a = 0; a < dim; ++a) {
    const std::size_t at = r.pos();
    const double L = r.get<double>("lengths");
    if (!(L > 0.0) || !std::isfinite(L)) throw CorruptFileError(at, "bad box length at offset " + std::to_string(at));
    g.lengths[a] = L;
  }
  RunState s;
  s.time = r.get<double>("time");
  s.step = r.get<std::uint64_t>("step");

  const std::size_t need = r.pos() + 2 * g.size() * sizeof(double);
  if (r.size() != need)
    throw CorruptFileError(std::min(r.size(), need), "checkpoint size " + std::to_string(r.size()) +
                                                         " does not match header (expected " +
                                                         std::to_string(need) + ")");
  s.u = Field(g);
  s.v = Field(g);
  r.doubles(s.u.values, "u");
  r.doubles(s.v.values, "v");
  return s;
}

}  // namespace okpf
