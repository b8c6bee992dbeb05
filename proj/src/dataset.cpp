#include "milboost/dataset.hpp"

#include "milboost/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace mil {

std::string to_string(DatasetFormat f) {
  switch (f) {
    case DatasetFormat::UcrTs: return "ucr_ts";
    case DatasetFormat::BagCsv: return "bag_csv";
    case DatasetFormat::GramCsv: return "gram_csv";
  }
  return "?";
}

DatasetFormat dataset_format_from_string(const std::string& name) {
  if (name == "ucr_ts") return DatasetFormat::UcrTs;
  if (name == "bag_csv") return DatasetFormat::BagCsv;
  if (name == "gram_csv") return DatasetFormat::GramCsv;
  throw ValidationError("unknown dataset format '" + name + "' (expected ucr_ts, bag_csv or gram_csv)");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Splits on commas and whitespace, dropping empty fields.
std::vector<std::string> tokens(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',' || c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

// Comma-separated fields, each trimmed; empty fields kept.
std::vector<std::string> csv_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(trim(f));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& v) {
  const char* b = s.data();
  const char* e = b + s.size();
  if (b != e && *b == '+') ++b;
  const auto res = std::from_chars(b, e, v);
  return res.ec == std::errc() && res.ptr == e;
}

double number(const std::string& tok, const std::string& name, std::size_t line) {
  double v = 0;
  if (!parse_double(tok, v)) throw ParseError(name, line, "not a number: '" + tok + "'");
  return v;
}

bool skippable(const std::string& line) {
  const std::string t = trim(line);
  return t.empty() || t[0] == '#';
}

std::vector<std::string> distinct(const std::vector<std::string>& labels) {
  std::set<std::string> s(labels.begin(), labels.end());
  return {s.begin(), s.end()};
}

}  // namespace

std::string canonical_label(const std::string& token) {
  double v = 0;
  if (parse_double(token, v) && std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15) {
    const auto n = static_cast<long long>(v);
    return std::to_string(n);
  }
  return token;
}

LabelMapping LabelMapping::parse(const std::string& text) {
  LabelMapping m;
  const std::string t = trim(text);
  if (t.empty() || t == "auto") return m;
  if (t[0] == '+' && t.find(':') == std::string::npos) {
    m.positive = canonical_label(t.substr(1));
    if (m.positive.empty()) throw ValidationError("label mapping '+' needs a label");
    return m;
  }
  for (const std::string& item : csv_fields(t)) {
    const auto colon = item.rfind(':');
    if (colon == std::string::npos) throw ValidationError("label mapping entry '" + item + "' lacks ':'");
    const std::string name = canonical_label(trim(item.substr(0, colon)));
    const std::string value = trim(item.substr(colon + 1));
    int y = 0;
    if (value == "+1" || value == "1") y = 1;
    else if (value == "-1") y = -1;
    else throw ValidationError("label mapping value for '" + name + "' must be +1 or -1");
    m.map[name] = y;
  }
  return m;
}

std::map<std::string, int> LabelMapping::resolve(const std::vector<std::string>& observed) const {
  const std::vector<std::string> labels = distinct(observed);
  std::map<std::string, int> out;
  if (automatic()) {
    if (labels.size() != 2) {
      std::string list;
      for (const auto& l : labels) list += (list.empty() ? "" : ", ") + l;
      throw ValidationError("expected exactly two label values, found " + std::to_string(labels.size()) +
                            " (" + list + "); pass an explicit label mapping");
    }
    out[labels[0]] = -1;
    out[labels[1]] = 1;
    return out;
  }
  for (const auto& l : labels) {
    if (!positive.empty()) {
      out[l] = l == positive ? 1 : -1;
      continue;
    }
    const auto it = map.find(l);
    if (it == map.end()) throw ValidationError("label '" + l + "' is not covered by the label mapping");
    out[l] = it->second;
  }
  return out;
}

std::size_t Dataset::size() const { return is_series() ? series().size() : sample().size(); }

std::vector<int> Dataset::labels() const {
  std::vector<int> out;
  if (is_series())
    for (const auto& s : series()) out.push_back(s.label);
  else
    for (const auto& b : sample()) out.push_back(b.label);
  return out;
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.kernel = kernel;
  out.label_map = label_map;
  if (is_series()) {
    std::vector<TimeSeries> s;
    for (std::size_t i : indices) s.push_back(series().at(i));
    out.data = std::move(s);
  } else {
    out.data = sample().subset(indices);
  }
  if (!bag_ids.empty())
    for (std::size_t i : indices) out.bag_ids.push_back(bag_ids.at(i));
  return out;
}

std::vector<TimeSeries> parse_ucr(std::istream& in, const std::string& name, const LabelMapping& mapping,
                                  std::map<std::string, int>* resolved) {
  std::vector<TimeSeries> series;
  std::vector<std::string> raw_labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    const auto tok = tokens(line);
    if (tok.size() < 2) throw ParseError(name, lineno, "a series needs a label and at least one value");
    std::vector<double> vals;
    for (std::size_t k = 1; k < tok.size(); ++k) vals.push_back(number(tok[k], name, lineno));
    // trailing NaN is padding for shorter series
    while (!vals.empty() && std::isnan(vals.back())) vals.pop_back();
    if (vals.empty()) throw ParseError(name, lineno, "series has no values");
    for (double v : vals)
      if (!std::isfinite(v)) throw ParseError(name, lineno, "non-finite value inside a series");
    TimeSeries ts;
    ts.values = Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
    series.push_back(std::move(ts));
    raw_labels.push_back(canonical_label(tok[0]));
  }
  if (series.empty()) throw ParseError(name, lineno, "no series found");
  const auto map = mapping.resolve(raw_labels);
  for (std::size_t i = 0; i < series.size(); ++i) series[i].label = map.at(raw_labels[i]);
  if (resolved) *resolved = map;
  return series;
}

Sample parse_bag_csv(std::istream& in, const std::string& name, const LabelMapping& mapping,
                     std::vector<std::string>* bag_ids, std::map<std::string, int>* resolved) {
  std::vector<std::string> order;
  std::unordered_map<std::string, std::size_t> where;
  std::vector<std::vector<Instance>> bags;
  std::vector<std::string> bag_label;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    const auto f = csv_fields(line);
    if (f.size() < 3) throw ParseError(name, lineno, "expected bag_id, label and at least one feature");
    if (first) {
      first = false;
      double dummy = 0;
      if (!parse_double(f[2], dummy)) continue;  // header row
    }
    if (width == 0) width = f.size();
    if (f.size() != width)
      throw ParseError(name, lineno, "ragged row: " + std::to_string(f.size() - 2) + " features, expected " +
                                         std::to_string(width - 2));
    Instance x(static_cast<Eigen::Index>(width - 2));
    for (std::size_t k = 2; k < width; ++k) {
      x[static_cast<Eigen::Index>(k - 2)] = number(f[k], name, lineno);
      if (!std::isfinite(x[static_cast<Eigen::Index>(k - 2)])) throw ParseError(name, lineno, "non-finite feature");
    }
    const std::string label = canonical_label(f[1]);
    auto it = where.find(f[0]);
    if (it == where.end()) {
      it = where.emplace(f[0], bags.size()).first;
      order.push_back(f[0]);
      bags.emplace_back();
      bag_label.push_back(label);
    } else if (bag_label[it->second] != label) {
      throw ParseError(name, lineno, "bag '" + f[0] + "' has conflicting labels");
    }
    bags[it->second].push_back(std::move(x));
  }
  if (bags.empty()) throw ParseError(name, lineno, "no bags found");
  const auto map = mapping.resolve(bag_label);
  Sample s;
  for (std::size_t b = 0; b < bags.size(); ++b) s.add(Bag(std::move(bags[b])), map.at(bag_label[b]));
  if (bag_ids) *bag_ids = order;
  if (resolved) *resolved = map;
  return s;
}

namespace {

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return in;
}

Dataset load_gram(const DatasetSource& src) {
  if (src.index_path.empty()) throw ValidationError("gram_csv needs an index file (bag_id,label per row)");
  std::ifstream gin = open(src.path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(gin, line)) {
    ++lineno;
    if (skippable(line)) continue;
    std::vector<double> r;
    for (const auto& t : tokens(line)) r.push_back(number(t, src.path, lineno));
    if (!rows.empty() && r.size() != rows.front().size()) throw ParseError(src.path, lineno, "ragged Gram row");
    rows.push_back(std::move(r));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (n == 0) throw ParseError(src.path, lineno, "empty Gram matrix");
  if (static_cast<Eigen::Index>(rows.front().size()) != n)
    throw ParseError(src.path, lineno, "Gram matrix is not square");
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];

  std::ifstream iin = open(src.index_path);
  std::vector<std::string> order, bag_label;
  std::unordered_map<std::string, std::size_t> where;
  std::vector<std::vector<Instance>> bags;
  Eigen::Index row = 0;
  lineno = 0;
  while (std::getline(iin, line)) {
    ++lineno;
    if (skippable(line)) continue;
    const auto f = csv_fields(line);
    if (f.size() != 2) throw ParseError(src.index_path, lineno, "expected bag_id,label");
    if (row == 0 && f[0] == "bag_id") continue;
    if (row >= n) throw ParseError(src.index_path, lineno, "more index rows than Gram rows");
    const std::string label = canonical_label(f[1]);
    auto it = where.find(f[0]);
    if (it == where.end()) {
      it = where.emplace(f[0], bags.size()).first;
      order.push_back(f[0]);
      bags.emplace_back();
      bag_label.push_back(label);
    } else if (bag_label[it->second] != label) {
      throw ParseError(src.index_path, lineno, "bag '" + f[0] + "' has conflicting labels");
    }
    bags[it->second].push_back(Instance::Constant(1, static_cast<double>(row)));
    ++row;
  }
  if (row != n)
    throw ParseError(src.index_path, lineno,
                     "index has " + std::to_string(row) + " rows, Gram matrix has " + std::to_string(n));
  Dataset ds;
  ds.label_map = src.labels.resolve(bag_label);
  Sample s;
  for (std::size_t b = 0; b < bags.size(); ++b) s.add(Bag(std::move(bags[b])), ds.label_map.at(bag_label[b]));
  ds.data = std::move(s);
  ds.bag_ids = order;
  ds.kernel = KernelSpec::precomputed(std::move(g));
  return ds;
}

}  // namespace

Dataset load_dataset(const DatasetSource& src) {
  if (src.format == DatasetFormat::GramCsv) return load_gram(src);
  std::ifstream in = open(src.path);
  Dataset ds;
  if (src.format == DatasetFormat::UcrTs) {
    ds.data = parse_ucr(in, src.path, src.labels, &ds.label_map);
  } else {
    ds.data = parse_bag_csv(in, src.path, src.labels, &ds.bag_ids, &ds.label_map);
  }
  return ds;
}

}  // namespace mil
