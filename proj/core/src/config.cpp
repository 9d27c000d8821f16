#include "srom/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "srom/errors.hpp"

namespace srom {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string join_doubles(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += format_double(v[i]);
  }
  return out;
}

std::string join_indices(const std::vector<Index>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

std::string join_strings(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += v[i];
  }
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: bad numeric value for " + key + ": " + s);
  }
}

Index parse_index(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return static_cast<Index>(v);
  } catch (const std::exception&) {
    throw ConfigError("config: bad integer value for " + key + ": " + s);
  }
}

std::vector<double> parse_doubles(const std::string& s, const std::string& key) {
  std::vector<double> out;
  for (const std::string& tok : split(s, ',')) out.push_back(parse_double(tok, key));
  return out;
}

std::vector<Index> parse_indices(const std::string& s, const std::string& key) {
  std::vector<Index> out;
  for (const std::string& tok : split(s, ',')) out.push_back(parse_index(tok, key));
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  std::size_t b = s.find_last_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

}  // namespace

std::vector<double> parse_value_grid(const std::string& text) {
  if (text.rfind("log:", 0) == 0) {
    const auto parts = split(text, ':');
    if (parts.size() != 4) throw ConfigError("config: grid wants log:<lo>:<hi>:<count>");
    const double lo = parse_double(parts[1], "grid lo");
    const double hi = parse_double(parts[2], "grid hi");
    const Index count = parse_index(parts[3], "grid count");
    if (!(lo > 0.0) || !(hi > lo) || count < 2)
      throw ConfigError("config: degenerate log grid");
    std::vector<double> out(static_cast<std::size_t>(count));
    const double la = std::log10(lo);
    const double lb = std::log10(hi);
    for (Index i = 0; i < count; ++i)
      out[static_cast<std::size_t>(i)] =
          std::pow(10.0, la + (lb - la) * static_cast<double>(i) /
                               static_cast<double>(count - 1));
    return out;
  }
  return parse_doubles(text, "grid");
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream out;
  out << "experiment=" << experiment << "\n";
  out << "paradigm=" << join_strings(paradigms) << "\n";
  out << "svd_method=" << svd_method << "\n";
  out << "rls_method=" << rls_method << "\n";
  out << "r=" << join_indices(r_list) << "\n";
  out << "gamma1=" << format_double(gamma1) << "\n";
  out << "gamma2=" << format_double(gamma2) << "\n";
  out << "gamma1_grid=" << join_doubles(gamma1_grid) << "\n";
  out << "gamma2_grid=" << join_doubles(gamma2_grid) << "\n";
  out << "fd_scheme=" << fd_scheme << "\n";
  out << "dt=" << format_double(dt) << "\n";
  out << "checkpoints=" << join_indices(checkpoints) << "\n";
  out << "seed=" << seed << "\n";
  out << "out_dir=" << out_dir << "\n";
  out << "data_dir=" << data_dir << "\n";
  out << "n=" << n << "\n";
  out << "t_final=" << format_double(t_final) << "\n";
  out << "store_every=" << store_every << "\n";
  out << "mu_list=" << join_doubles(mu_list) << "\n";
  out << "trace_stride=" << trace_stride << "\n";
  out << "le_count=" << le_count << "\n";
  out << "le_t_total=" << format_double(le_t_total) << "\n";
  out << "le_dt=" << format_double(le_dt) << "\n";
  out << "le_renorm=" << le_renorm << "\n";
  out << "train_files=" << join_strings(train_files) << "\n";
  out << "deriv_files=" << join_strings(deriv_files) << "\n";
  out << "input_files=" << join_strings(input_files) << "\n";
  out << "validation_file=" << validation_file << "\n";
  return out.str();
}

ExperimentConfig ExperimentConfig::parse_string(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  Index line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(line_no) + " is not key=value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    cfg.keys_seen.insert(key);

    if (key == "experiment") cfg.experiment = value;
    else if (key == "paradigm") cfg.paradigms = split(value, ',');
    else if (key == "svd_method") cfg.svd_method = value;
    else if (key == "rls_method") cfg.rls_method = value;
    else if (key == "r") cfg.r_list = parse_indices(value, key);
    else if (key == "gamma1") cfg.gamma1 = parse_double(value, key);
    else if (key == "gamma2") cfg.gamma2 = parse_double(value, key);
    else if (key == "gamma1_grid") cfg.gamma1_grid = value.empty() ? std::vector<double>{} : parse_value_grid(value);
    else if (key == "gamma2_grid") cfg.gamma2_grid = value.empty() ? std::vector<double>{} : parse_value_grid(value);
    else if (key == "fd_scheme") cfg.fd_scheme = value;
    else if (key == "dt") cfg.dt = parse_double(value, key);
    else if (key == "checkpoints") cfg.checkpoints = value.empty() ? std::vector<Index>{} : parse_indices(value, key);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_index(value, key));
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "data_dir") cfg.data_dir = value;
    else if (key == "n") cfg.n = parse_index(value, key);
    else if (key == "t_final") cfg.t_final = parse_double(value, key);
    else if (key == "store_every") cfg.store_every = parse_index(value, key);
    else if (key == "mu_list") cfg.mu_list = value.empty() ? std::vector<double>{} : parse_doubles(value, key);
    else if (key == "trace_stride") cfg.trace_stride = parse_index(value, key);
    else if (key == "le_count") cfg.le_count = parse_index(value, key);
    else if (key == "le_t_total") cfg.le_t_total = parse_double(value, key);
    else if (key == "le_dt") cfg.le_dt = parse_double(value, key);
    else if (key == "le_renorm") cfg.le_renorm = parse_index(value, key);
    else if (key == "train_files") cfg.train_files = value.empty() ? std::vector<std::string>{} : split(value, ',');
    else if (key == "deriv_files") cfg.deriv_files = value.empty() ? std::vector<std::string>{} : split(value, ',');
    else if (key == "input_files") cfg.input_files = value.empty() ? std::vector<std::string>{} : split(value, ',');
    else if (key == "validation_file") cfg.validation_file = value;
    else throw ConfigError("config: unknown key '" + key + "'");
  }
  if (cfg.experiment != "burgers" && cfg.experiment != "kse" &&
      cfg.experiment != "custom-stream")
    throw ConfigError("config: unknown experiment '" + cfg.experiment + "'");
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str());
}

void ExperimentConfig::apply_defaults() {
  if (experiment == "burgers") {
    if (n == 0) n = 128;
    if (dt == 0.0) dt = 1e-4;
    if (t_final == 0.0) t_final = 1.0;
    if (mu_list.empty())
      for (int i = 1; i <= 10; ++i) mu_list.push_back(0.1 * i);
    if (r_list.empty())
      for (Index r = 1; r <= 14; ++r) r_list.push_back(r);
  } else if (experiment == "kse") {
    if (n == 0) n = 512;
    if (dt == 0.0) dt = 1e-3;
    if (t_final == 0.0) t_final = 300.0;
    if (store_every <= 1) store_every = 100;
    if (r_list.empty()) r_list = {9, 12, 15, 18, 21, 24};
    if (!keys_seen.count("paradigm")) paradigms = {"isvd-project-rls"};
    if (!keys_seen.count("svd_method")) svd_method = "baker";
  }
  if (data_dir.empty()) data_dir = out_dir;
}

}  // namespace srom
