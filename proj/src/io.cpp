#include "unimix/io.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace unimix {

namespace {

std::string_view trimmed(std::string_view s) {
  const char* ws = " \t\r\f\v";
  const std::size_t first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const std::size_t last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

}  // namespace

double parse_double(const std::string& text) {
  const std::string_view body = trimmed(text);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(body.data(), body.data() + body.size(), value);
  if (ec != std::errc() || ptr != body.data() + body.size())
    throw std::runtime_error("not a number: \"" + text + "\"");
  return value;
}

std::vector<double> parse_observations(const std::string& text,
                                       const std::string& origin) {
  std::vector<double> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    const std::size_t end = eol == std::string::npos ? text.size() : eol;
    ++line_no;
    const std::string_view line = trimmed(
        std::string_view(text).substr(pos, end - pos));
    pos = end + 1;
    if (line.empty() || line.front() == '#') {
      if (eol == std::string::npos) break;
      continue;
    }
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(line.data(), line.data() + line.size(), value);
    if (ec != std::errc() || ptr != line.data() + line.size())
      throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                               ": not a number: \"" + std::string(line) + "\"");
    out.push_back(value);
    if (eol == std::string::npos) break;
  }
  return out;
}

std::vector<double> read_observations(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in)
    throw std::runtime_error("cannot open " + file.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_observations(buffer.str(), file.string());
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string density_csv(const DensityGrid& grid) {
  std::string out = "t,estimate\n";
  for (std::size_t i = 0; i < grid.t.size(); ++i) {
    out += format_double(grid.t[i]);
    out += ',';
    out += format_double(grid.estimate[i]);
    out += '\n';
  }
  return out;
}

void write_text_file(const std::filesystem::path& file,
                     const std::string& content) {
  std::ofstream out(file, std::ios::binary);
  out << content;
  if (!out)
    throw std::runtime_error("cannot write " + file.string());
}

void write_density_csv(const std::filesystem::path& file,
                       const DensityGrid& grid) {
  write_text_file(file, density_csv(grid));
}

GridSpec GridSpec::parse(const std::string& text) {
  const std::size_t first = text.find(':');
  const std::size_t second =
      first == std::string::npos ? std::string::npos : text.find(':', first + 1);
  if (second == std::string::npos ||
      text.find(':', second + 1) != std::string::npos)
    throw std::runtime_error("grid spec must be lo:hi:step, got \"" + text + "\"");
  GridSpec spec;
  spec.lo = parse_double(text.substr(0, first));
  spec.hi = parse_double(text.substr(first + 1, second - first - 1));
  spec.step = parse_double(text.substr(second + 1));
  if (!(spec.step > 0.0) || spec.hi < spec.lo)
    throw std::runtime_error("grid spec needs hi >= lo and step > 0");
  return spec;
}

std::vector<double> GridSpec::points() const {
  const int count = static_cast<int>((hi - lo) / step + 1e-9) + 1;
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    out[static_cast<std::size_t>(i)] = lo + step * i;
  return out;
}

std::filesystem::path resolve_results_dir(
    const std::optional<std::string>& out_flag) {
  std::filesystem::path dir;
  if (out_flag) {
    dir = *out_flag;
  } else if (const char* env = std::getenv("UNIMIX_RESULTS_DIR")) {
    dir = env;
  } else {
    dir = std::filesystem::current_path();
  }
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace unimix
