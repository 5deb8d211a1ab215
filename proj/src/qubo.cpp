#include "ratescale/qubo.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ratescale/scale.hpp"

namespace ratescale {

double QuboModel::evaluate(std::span<const std::uint8_t> state) const {
  if (static_cast<int>(state.size()) != dimension)
    throw std::invalid_argument("evaluate: state length " +
                                std::to_string(state.size()) +
                                " does not match dimension " +
                                std::to_string(dimension));
  double e = offset;
  for (const auto& [i, c] : linear)
    if (state[i]) e += c;
  for (const auto& [i, j, c] : quadratic)
    if (state[i] && state[j]) e += c;
  return e;
}

QuboBuilder::QuboBuilder(int dimension) : dimension_(dimension) {
  if (dimension < 0) throw std::invalid_argument("qubo: negative dimension");
  linear_.assign(dimension, 0.0);
}

void QuboBuilder::add_linear(int i, double c) {
  if (i < 0 || i >= dimension_)
    throw std::out_of_range("qubo: linear index " + std::to_string(i));
  linear_[i] += c;
}

void QuboBuilder::add_quadratic(int i, int j, double c) {
  if (i < 0 || i >= dimension_ || j < 0 || j >= dimension_)
    throw std::out_of_range("qubo: quadratic index (" + std::to_string(i) +
                            ", " + std::to_string(j) + ")");
  if (i == j) { // x^2 = x
    linear_[i] += c;
    return;
  }
  if (i > j) std::swap(i, j);
  quad_.emplace_back((static_cast<std::uint64_t>(i) << 32) |
                         static_cast<std::uint32_t>(j),
                     c);
}

void QuboBuilder::add_model(const QuboModel& part, double factor) {
  if (part.dimension > dimension_)
    throw std::invalid_argument("qubo: part dimension exceeds target");
  offset_ += factor * part.offset;
  for (const auto& [i, c] : part.linear) linear_[i] += factor * c;
  for (const auto& [i, j, c] : part.quadratic)
    quad_.emplace_back((static_cast<std::uint64_t>(i) << 32) |
                           static_cast<std::uint32_t>(j),
                       factor * c);
}

QuboModel QuboBuilder::build() {
  QuboModel model;
  model.dimension = dimension_;
  model.offset = offset_;
  for (int i = 0; i < dimension_; ++i)
    if (linear_[i] != 0.0) model.linear.emplace_back(i, linear_[i]);

  std::sort(quad_.begin(), quad_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t k = 0; k < quad_.size();) {
    const std::uint64_t key = quad_[k].first;
    double sum = 0.0;
    while (k < quad_.size() && quad_[k].first == key) sum += quad_[k++].second;
    if (sum != 0.0)
      model.quadratic.emplace_back(static_cast<int>(key >> 32),
                                   static_cast<int>(key & 0xffffffffu), sum);
  }
  return model;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("qubo: format failure");
  return std::string(buf, ptr);
}

double parse_double(const std::string& s) {
  double v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw std::runtime_error("qubo: bad coefficient '" + s + "'");
  return v;
}

} // namespace

void save_qubo(const QuboModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("qubo: cannot write " + path.string());
  out << "qubo v1 dim=" << model.dimension << " offset="
      << format_double(model.offset) << '\n';
  for (const auto& [i, c] : model.linear)
    out << "L " << i << ' ' << format_double(c) << '\n';
  for (const auto& [i, j, c] : model.quadratic)
    out << "Q " << i << ' ' << j << ' ' << format_double(c) << '\n';
}

QuboModel load_qubo(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("qubo: cannot open " + path.string());

  std::string header;
  if (!std::getline(in, header))
    throw std::runtime_error("qubo: empty file " + path.string());
  if (!header.empty() && header.back() == '\r') header.pop_back();

  int dim = -1;
  double offset = 0.0;
  {
    std::istringstream hs(header);
    std::string magic, version, dim_field, offset_field;
    hs >> magic >> version >> dim_field >> offset_field;
    if (magic != "qubo" || version != "v1" ||
        dim_field.rfind("dim=", 0) != 0 || offset_field.rfind("offset=", 0) != 0)
      throw std::runtime_error("qubo: bad header '" + header + "'");
    dim = std::stoi(dim_field.substr(4));
    offset = parse_double(offset_field.substr(7));
    if (dim < 0) throw std::runtime_error("qubo: negative dimension");
  }

  QuboBuilder builder(dim);
  builder.add_offset(offset);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    try {
      if (kind == "L") {
        int i;
        std::string c;
        if (!(ls >> i >> c)) throw std::runtime_error("short line");
        builder.add_linear(i, parse_double(c));
      } else if (kind == "Q") {
        int i, j;
        std::string c;
        if (!(ls >> i >> j >> c)) throw std::runtime_error("short line");
        if (i == j) throw std::runtime_error("diagonal pair");
        builder.add_quadratic(i, j, parse_double(c));
      } else {
        throw std::runtime_error("unknown record '" + kind + "'");
      }
      std::string rest;
      if (ls >> rest) throw std::runtime_error("trailing field '" + rest + "'");
    } catch (const std::out_of_range& e) {
      throw std::runtime_error("qubo: " + std::string(e.what()) + " in '" +
                               line + "'");
    } catch (const std::runtime_error& e) {
      throw std::runtime_error("qubo: " + std::string(e.what()) + " in '" +
                               line + "'");
    }
  }
  return builder.build();
}

namespace {

int slack_width_for(int range) {
  // floor(1 + log2(range)) bits cover the integers [0, range]; 0 when the
  // inequality is already tight.
  if (range <= 0) return 0;
  return std::bit_width(static_cast<unsigned>(range));
}

} // namespace

VariableLayout VariableLayout::create(int n, int m, const LayoutOptions& options) {
  if (m < 2) throw std::invalid_argument("layout: m must be at least 2");
  if (m > n) throw std::invalid_argument("layout: m must not exceed n");

  VariableLayout layout;
  layout.n = n;
  layout.m = m;

  if (options.include_thresholds) {
    layout.include_thresholds = true;
    layout.lambda1 = options.lambda1.value_or(default_lambda1(n));
    layout.lambda2 = options.lambda2.value_or(default_lambda2(n));
    if (layout.lambda1 < 0 || layout.lambda2 < layout.lambda1)
      throw std::invalid_argument("layout: need 0 <= lambda1 <= lambda2");
    if (static_cast<long long>(m) * layout.lambda1 > n)
      throw std::invalid_argument(
          "layout: infeasible thresholds, m*lambda1 = " +
          std::to_string(static_cast<long long>(m) * layout.lambda1) +
          " > n = " + std::to_string(n));
    if (static_cast<long long>(m) * layout.lambda2 < n)
      throw std::invalid_argument(
          "layout: infeasible thresholds, m*lambda2 = " +
          std::to_string(static_cast<long long>(m) * layout.lambda2) +
          " < n = " + std::to_string(n));
    layout.slack1_width = slack_width_for(n - layout.lambda1);
    layout.slack2_width = slack_width_for(layout.lambda2);
  }

  if (options.exact_monotonicity) {
    const int d = options.default_count;
    if (d < 1 || d > n - 1)
      throw std::invalid_argument(
          "layout: exact monotonicity requires 1 <= d <= n-1, got d = " +
          std::to_string(d));
    layout.exact_monotonicity = true;
    layout.default_count = d;
    layout.slack_mono_width = slack_width_for((n - d) * d);
  }
  return layout;
}

} // namespace ratescale
