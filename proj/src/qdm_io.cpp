#include "scrooge/qdm_io.hpp"

#include <json.hpp>

#include <cstring>
#include <fstream>
#include <sstream>

namespace scrooge {

namespace {

using nlohmann::json;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json to_json(const DensityMatrix& rho) {
  const Index d = rho.dim();
  json re = json::array();
  json im = json::array();
  for (Index r = 0; r < d; ++r) {
    json re_row = json::array();
    json im_row = json::array();
    for (Index c = 0; c < d; ++c) {
      re_row.push_back(rho.matrix()(r, c).real());
      im_row.push_back(rho.matrix()(r, c).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  return json{{"format", "qdm-json-1"},
              {"dim", d},
              {"factor_dims", rho.factor_dims()},
              {"re", std::move(re)},
              {"im", std::move(im)}};
}

DensityMatrix from_json(const json& j) {
  if (!j.is_object() || j.value("format", "") != std::string("qdm-json-1")) {
    throw ParseError("qdm-json-1: missing or unknown \"format\" field");
  }
  const Index d = j.at("dim").get<Index>();
  std::vector<Index> dims = j.at("factor_dims").get<std::vector<Index>>();
  const json& re = j.at("re");
  const json& im = j.at("im");
  if (static_cast<Index>(re.size()) != d || static_cast<Index>(im.size()) != d) {
    throw ParseError("qdm-json-1: re/im row count does not match dim");
  }
  Matrix m(d, d);
  for (Index r = 0; r < d; ++r) {
    const json& re_row = re.at(static_cast<size_t>(r));
    const json& im_row = im.at(static_cast<size_t>(r));
    if (static_cast<Index>(re_row.size()) != d || static_cast<Index>(im_row.size()) != d) {
      std::ostringstream msg;
      msg << "qdm-json-1: row " << r << " has wrong length";
      throw ParseError(msg.str());
    }
    for (Index c = 0; c < d; ++c) {
      m(r, c) = Complex(re_row.at(static_cast<size_t>(c)).get<double>(),
                        im_row.at(static_cast<size_t>(c)).get<double>());
    }
  }
  return DensityMatrix(std::move(m), std::move(dims));
}

void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

void write_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  write_u64(out, bits);
}

std::uint64_t read_u64(std::istream& in, std::uint64_t& offset) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (!in) {
    std::ostringstream msg;
    msg << "QDM1: truncated read at byte offset " << offset;
    throw ParseError(msg.str());
  }
  offset += 8;
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

double read_f64(std::istream& in, std::uint64_t& offset) {
  std::uint64_t bits = read_u64(in, offset);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

std::string qdm_json_string(const DensityMatrix& rho) { return to_json(rho).dump(); }

DensityMatrix qdm_from_json_string(const std::string& text) {
  try {
    return from_json(json::parse(text));
  } catch (const json::parse_error& e) {
    std::ostringstream msg;
    msg << "qdm-json-1 parse error at byte " << e.byte << ": " << e.what();
    throw ParseError(msg.str());
  }
}

void save_qdm_json(const DensityMatrix& rho, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << to_json(rho).dump() << '\n';
}

void save_qdm_binary(const DensityMatrix& rho, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write("QDM1", 4);
  write_u64(out, static_cast<std::uint64_t>(rho.dim()));
  write_u64(out, static_cast<std::uint64_t>(rho.factor_dims().size()));
  for (Index fd : rho.factor_dims()) write_u64(out, static_cast<std::uint64_t>(fd));
  const Index d = rho.dim();
  for (Index r = 0; r < d; ++r) {
    for (Index c = 0; c < d; ++c) {
      write_f64(out, rho.matrix()(r, c).real());
      write_f64(out, rho.matrix()(r, c).imag());
    }
  }
}

DensityMatrix load_qdm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  char magic[4] = {0, 0, 0, 0};
  in.read(magic, 4);
  if (in && std::memcmp(magic, "QDM1", 4) == 0) {
    std::uint64_t offset = 4;
    const Index d = static_cast<Index>(read_u64(in, offset));
    const std::uint64_t n_factors = read_u64(in, offset);
    if (d < 1 || d > kMaxMatrixDim || n_factors > 64) {
      std::ostringstream msg;
      msg << "QDM1: implausible header (dim " << d << ", " << n_factors
          << " factors) near byte offset " << offset;
      throw ParseError(msg.str());
    }
    std::vector<Index> dims;
    dims.reserve(n_factors);
    for (std::uint64_t i = 0; i < n_factors; ++i) {
      dims.push_back(static_cast<Index>(read_u64(in, offset)));
    }
    Matrix m(d, d);
    for (Index r = 0; r < d; ++r) {
      for (Index c = 0; c < d; ++c) {
        double re = read_f64(in, offset);
        double im = read_f64(in, offset);
        m(r, c) = Complex(re, im);
      }
    }
    return DensityMatrix(std::move(m), std::move(dims));
  }
  // Fall back to JSON.
  in.clear();
  in.seekg(0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return qdm_from_json_string(buf.str());
}

}  // namespace scrooge
