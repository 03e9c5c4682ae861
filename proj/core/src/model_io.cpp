#include "pwvcast/model_io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "pwvcast/errors.hpp"

namespace pwvcast {

namespace {

std::vector<std::size_t> parse_layer_list(const std::string& text) {
  std::vector<std::size_t> sizes;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos || item.size() > 9) {
      throw FormatError("bad layer size '" + item + "' in architecture line");
    }
    const auto h = std::stoul(item);
    if (h == 0) throw FormatError("layer size 0 in architecture line");
    sizes.push_back(h);
  }
  if (sizes.empty()) throw FormatError("architecture line lists no layers");
  return sizes;
}

std::string field_value(const std::string& token, const std::string& key) {
  const std::string prefix = key + "=";
  if (token.rfind(prefix, 0) != 0) {
    throw FormatError("expected '" + prefix + "...' in architecture line, got '" + token + "'");
  }
  return token.substr(prefix.size());
}

double read_hex(std::istream& in, const std::string& where) {
  std::string token;
  if (!(in >> token)) throw FormatError("truncated file: missing value in " + where);
  const auto value = hex_to_double(token);
  if (!value) throw FormatError("malformed hex value '" + token + "' in " + where);
  if (!std::isfinite(*value)) throw FormatError("non-finite value in " + where);
  return *value;
}

}  // namespace

std::string double_to_hex(double value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(value)));
  return buf;
}

std::optional<double> hex_to_double(std::string_view text) {
  if (text.size() != 16) return std::nullopt;
  std::uint64_t bits = 0;
  for (char c : text) {
    int digit;
    if (c >= '0' && c <= '9') {
      digit = c - '0';
    } else if (c >= 'a' && c <= 'f') {
      digit = c - 'a' + 10;
    } else {
      return std::nullopt;
    }
    bits = (bits << 4) | static_cast<std::uint64_t>(digit);
  }
  return std::bit_cast<double>(bits);
}

void write_model(const LstmModel& model, std::ostream& out) {
  out << kModelMagic << ' ' << kModelFormatVersion << '\n';
  out << "layers=";
  const auto arch = model.architecture();
  for (std::size_t l = 0; l < arch.size(); ++l) out << (l ? "," : "") << arch[l];
  out << " window=" << model.window_width << " norm=";
  if (model.normalization) {
    out << double_to_hex(model.normalization->mean) << ',' << double_to_hex(model.normalization->stddev);
  } else {
    out << "none";
  }
  out << '\n';

  for_each_tensor(model.params, [&out](const TensorView<const double>& t) {
    out << t.name << ' ' << t.rows << ' ' << t.cols << '\n';
    for (Index r = 0; r < t.rows; ++r) {
      for (Index c = 0; c < t.cols; ++c) out << (c ? " " : "") << double_to_hex(t.at(r, c));
      out << '\n';
    }
  });
}

LstmModel read_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty model file");
  {
    std::istringstream magic_line(line);
    std::string magic, version, extra;
    magic_line >> magic >> version;
    if (magic != kModelMagic) throw FormatError("not a model file: bad magic header");
    if (version != std::to_string(kModelFormatVersion) || (magic_line >> extra)) {
      throw FormatError("unsupported model format version '" + version + "' (expected " +
                        std::to_string(kModelFormatVersion) + ")");
    }
  }

  if (!std::getline(in, line)) throw FormatError("truncated file: missing architecture line");
  std::istringstream arch_line(line);
  std::string layers_tok, window_tok, norm_tok, extra;
  if (!(arch_line >> layers_tok >> window_tok >> norm_tok) || (arch_line >> extra)) {
    throw FormatError("architecture line must be 'layers=... window=... norm=...'");
  }
  const auto arch = parse_layer_list(field_value(layers_tok, "layers"));
  const std::string window_text = field_value(window_tok, "window");
  if (window_text.empty() || window_text.find_first_not_of("0123456789") != std::string::npos ||
      window_text.size() > 9 || std::stoul(window_text) == 0) {
    throw FormatError("bad window width '" + window_text + "'");
  }

  LstmModel model;
  model.window_width = std::stoul(window_text);
  const std::string norm_text = field_value(norm_tok, "norm");
  if (norm_text != "none") {
    const auto comma = norm_text.find(',');
    const auto mean = comma == std::string::npos ? std::nullopt : hex_to_double(norm_text.substr(0, comma));
    const auto stddev =
        comma == std::string::npos ? std::nullopt : hex_to_double(norm_text.substr(comma + 1));
    if (!mean || !stddev || !std::isfinite(*mean) || !std::isfinite(*stddev) || !(*stddev > 0.0)) {
      throw FormatError("bad normalization '" + norm_text + "'");
    }
    model.normalization = Normalization{*mean, *stddev};
  }

  Index input_size = 1;
  for (const std::size_t h : arch) {
    model.params.layers.push_back(LstmLayerParams::zeros(static_cast<Index>(h), input_size));
    input_size = static_cast<Index>(h);
  }
  model.params.head.w = Eigen::VectorXd::Zero(input_size);

  std::size_t tensor_index = 0;
  for_each_tensor(model.params, [&](const TensorView<double>& t) {
    const std::string where = "tensor #" + std::to_string(tensor_index++) + " (" + std::string(t.name) + ")";
    std::string name;
    long long rows = -1, cols = -1;
    if (!(in >> name)) throw FormatError("truncated file: missing " + where);
    if (name != t.name) throw FormatError("expected " + where + ", found '" + name + "'");
    if (!(in >> rows >> cols)) throw FormatError("bad shape header for " + where);
    if (rows != t.rows || cols != t.cols) {
      throw FormatError("shape " + std::to_string(rows) + "x" + std::to_string(cols) + " of " + where +
                        " inconsistent with architecture (expected " + std::to_string(t.rows) + "x" +
                        std::to_string(t.cols) + ")");
    }
    for (Index r = 0; r < t.rows; ++r) {
      for (Index c = 0; c < t.cols; ++c) t.at(r, c) = read_hex(in, where);
    }
  });

  std::string trailing;
  if (in >> trailing) throw FormatError("unexpected trailing data '" + trailing + "'");
  return model;
}

void save_model(const LstmModel& model, const std::filesystem::path& path) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    write_model(model, out);
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw IoError("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot move model into place at " + path.string() + ": " + ec.message());
  }
}

LstmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file " + path.string());
  return read_model(in);
}

}  // namespace pwvcast
