#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "attnrank/error.hpp"
#include "attnrank/san.hpp"

namespace attnrank {
namespace {

constexpr const char* kMagic = "attnrank-san-model";
constexpr int kFormatVersion = 1;

void write_tensor(fmt::memory_buffer& buf, const std::string& name, const Matrix& m) {
  fmt::format_to(std::back_inserter(buf), "tensor {} {} {}\n", name, m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) buf.push_back(' ');
      fmt::format_to(std::back_inserter(buf), "{:a}", m(i, j));
    }
    buf.push_back('\n');
  }
}

double parse_hex(const std::string& token, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size()) throw InputError(fmt::format("bad number '{}' in {}", token, where));
  return v;
}

Matrix read_tensor(std::istream& in, const std::string& expected_name) {
  std::string tag, name;
  Eigen::Index rows = 0, cols = 0;
  if (!(in >> tag >> name >> rows >> cols) || tag != "tensor" || name != expected_name || rows < 0 || cols < 0) {
    throw InputError(fmt::format("model file: expected tensor '{}'", expected_name));
  }
  Matrix m(rows, cols);
  std::string token;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (!(in >> token)) throw InputError(fmt::format("model file: tensor '{}' is truncated", name));
      m(i, j) = parse_hex(token, name);
    }
  }
  return m;
}

}  // namespace

void save_model(const SanModel& model, const std::filesystem::path& path) {
  const auto& c = model.config;
  const auto& p = model.params;
  fmt::memory_buffer buf;
  auto out = std::back_inserter(buf);
  fmt::format_to(out, "{} {}\n", kMagic, kFormatVersion);
  fmt::format_to(out, "hidden_dim {}\nepochs {}\nbatch_size {}\nn_heads {}\nseed {}\n", c.hidden_dim, c.epochs,
                 c.batch_size, c.n_heads, c.seed);
  fmt::format_to(out, "learning_rate {:a}\ndropout_rate {:a}\nselu_lambda {:a}\nselu_alpha {:a}\n", c.learning_rate,
                 c.dropout_rate, c.selu_lambda, c.selu_alpha);
  fmt::format_to(out, "adam_beta1 {:a}\nadam_beta2 {:a}\nadam_epsilon {:a}\n", c.adam_beta1, c.adam_beta2,
                 c.adam_epsilon);
  fmt::format_to(out, "dims {} {} {} {}\n", model.n_features(), model.n_classes(), model.hidden_dim(),
                 model.n_heads());
  for (std::size_t h = 0; h < p.attention_weights.size(); ++h) {
    write_tensor(buf, fmt::format("attention_weight.{}", h), p.attention_weights[h]);
    write_tensor(buf, fmt::format("attention_bias.{}", h), p.attention_biases[h]);
  }
  write_tensor(buf, "w1", p.w1);
  write_tensor(buf, "b1", p.b1);
  write_tensor(buf, "w2", p.w2);
  write_tensor(buf, "b2", p.b2);

  std::ofstream file(path, std::ios::binary);
  if (!file) throw InputError(fmt::format("cannot write '{}'", path.string()));
  file.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

SanModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot read '{}'", path.string()));
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kMagic) {
    throw InputError(fmt::format("'{}' is not a SAN model file", path.string()));
  }
  if (version != kFormatVersion) throw InputError(fmt::format("unsupported model format version {}", version));

  SanModel model;
  auto& c = model.config;
  auto expect = [&](const char* key) {
    std::string k;
    if (!(in >> k) || k != key) throw InputError(fmt::format("model file: expected '{}'", key));
  };
  auto read_real = [&](const char* key) {
    expect(key);
    std::string token;
    in >> token;
    return parse_hex(token, key);
  };
  expect("hidden_dim");
  in >> c.hidden_dim;
  expect("epochs");
  in >> c.epochs;
  expect("batch_size");
  in >> c.batch_size;
  expect("n_heads");
  in >> c.n_heads;
  expect("seed");
  in >> c.seed;
  c.learning_rate = read_real("learning_rate");
  c.dropout_rate = read_real("dropout_rate");
  c.selu_lambda = read_real("selu_lambda");
  c.selu_alpha = read_real("selu_alpha");
  c.adam_beta1 = read_real("adam_beta1");
  c.adam_beta2 = read_real("adam_beta2");
  c.adam_epsilon = read_real("adam_epsilon");

  std::size_t n_features = 0, n_classes = 0, hidden = 0, heads = 0;
  expect("dims");
  if (!(in >> n_features >> n_classes >> hidden >> heads)) throw InputError("model file: bad dims line");
  if (heads != c.n_heads || hidden != c.hidden_dim) throw InputError("model file: dims disagree with config");

  auto& p = model.params;
  for (std::size_t h = 0; h < heads; ++h) {
    p.attention_weights.push_back(read_tensor(in, fmt::format("attention_weight.{}", h)));
    p.attention_biases.push_back(read_tensor(in, fmt::format("attention_bias.{}", h)).col(0));
  }
  p.w1 = read_tensor(in, "w1");
  p.b1 = read_tensor(in, "b1").col(0);
  p.w2 = read_tensor(in, "w2");
  p.b2 = read_tensor(in, "b2").col(0);

  if (model.n_features() != n_features || model.n_classes() != n_classes || model.hidden_dim() != hidden) {
    throw InputError("model file: tensor shapes disagree with dims");
  }
  for (std::size_t h = 0; h < heads; ++h) {
    if (p.attention_weights[h].rows() != static_cast<Eigen::Index>(n_features) ||
        p.attention_weights[h].cols() != static_cast<Eigen::Index>(n_features) ||
        p.attention_biases[h].size() != static_cast<Eigen::Index>(n_features)) {
      throw InputError("model file: attention tensor shapes disagree with dims");
    }
  }
  c.validate();
  return model;
}

}  // namespace attnrank
