#include "gsi/csv_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <unordered_map>

#include "gsi/error.hpp"

namespace gsi {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string parse_where(std::size_t line_no) {
  return "line " + std::to_string(line_no) + ": ";
}

double parse_number(const std::string& field, std::size_t line_no) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && last[-1] == ' ') --last;
  if (first < last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v)) {
    fail(ErrorKind::ParseError, parse_where(line_no) + "bad value '" + field + "'");
  }
  return v;
}

}  // namespace

Index LongFormDataset::a_index(const std::string& label) const {
  for (Index i = 0; i < a_labels.size(); ++i) {
    if (a_labels[i] == label) return i;
  }
  fail(ErrorKind::InvalidArgument, "unknown a label '" + label + "'");
}

Index LongFormDataset::b_index(const std::string& label) const {
  for (Index j = 0; j < b_labels.size(); ++j) {
    if (b_labels[j] == label) return j;
  }
  fail(ErrorKind::InvalidArgument, "unknown b label '" + label + "'");
}

IncompleteTensor LongFormDataset::to_tensor() const {
  if (a_labels.empty() || b_labels.empty() || value_names.empty()) {
    fail(ErrorKind::ParseError, "dataset has no observed rows");
  }
  std::unordered_map<std::string, Index> ai, bi;
  for (Index i = 0; i < a_labels.size(); ++i) ai.emplace(a_labels[i], i);
  for (Index j = 0; j < b_labels.size(); ++j) bi.emplace(b_labels[j], j);
  IncompleteTensor t(a_labels.size(), b_labels.size(), dim());
  for (const Row& r : rows) t.set(ai.at(r.a), bi.at(r.b), r.values);
  return t;
}

LongFormDataset LongFormDataset::from_tensor(const IncompleteTensor& tensor,
                                             std::vector<std::string> a_labels,
                                             std::vector<std::string> b_labels) {
  if (a_labels.size() != tensor.n_a() || b_labels.size() != tensor.n_b()) {
    fail(ErrorKind::InvalidArgument, "label counts do not match tensor extents");
  }
  LongFormDataset out;
  for (Index d = 0; d < tensor.dim(); ++d) out.value_names.push_back("y" + std::to_string(d));
  std::vector<bool> seen_a(tensor.n_a(), false), seen_b(tensor.n_b(), false);
  for (Index i = 0; i < tensor.n_a(); ++i) {
    for (Index j = 0; j < tensor.n_b(); ++j) {
      if (!tensor.observed(i, j)) continue;
      if (!seen_a[i]) out.a_labels.push_back(a_labels[i]);
      if (!seen_b[j]) out.b_labels.push_back(b_labels[j]);
      seen_a[i] = seen_b[j] = true;
      const auto cell = tensor.cell(i, j);
      out.rows.push_back({a_labels[i], b_labels[j], {cell.begin(), cell.end()}});
    }
  }
  return out;
}

LongFormDataset LongFormDataset::restrict_a(const std::vector<std::string>& keep) const {
  std::map<std::string, std::vector<const Row*>> by_a;
  for (const Row& r : rows) by_a[r.a].push_back(&r);
  LongFormDataset out;
  out.value_names = value_names;
  std::unordered_map<std::string, bool> seen_b;
  for (const std::string& label : keep) {
    const auto it = by_a.find(label);
    if (it == by_a.end()) {
      fail(ErrorKind::InvalidArgument, "subset label '" + label + "' not in dataset");
    }
    out.a_labels.push_back(label);
    for (const Row* r : it->second) {
      if (!seen_b[r->b]) {
        seen_b[r->b] = true;
        out.b_labels.push_back(r->b);
      }
      out.rows.push_back(*r);
    }
  }
  return out;
}

LongFormDataset read_csv(std::istream& in) {
  LongFormDataset data;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::unordered_map<std::string, bool> seen_a, seen_b;
  std::map<std::pair<std::string, std::string>, std::size_t> pairs;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f = split_fields(line);
    if (!have_header) {
      if (line_no == 1 && f[0].rfind("\xEF\xBB\xBF", 0) == 0) f[0].erase(0, 3);
      if (f.size() < 3 || f[0] != "a_id" || f[1] != "b_id") {
        fail(ErrorKind::ParseError,
             parse_where(line_no) + "header must be a_id,b_id,y0[,y1...]");
      }
      data.value_names.assign(f.begin() + 2, f.end());
      have_header = true;
      continue;
    }
    if (f.size() != data.value_names.size() + 2) {
      fail(ErrorKind::ParseError, parse_where(line_no) + "expected " +
                                      std::to_string(data.value_names.size() + 2) +
                                      " fields, found " + std::to_string(f.size()));
    }
    if (f[0].empty() || f[1].empty()) {
      fail(ErrorKind::ParseError, parse_where(line_no) + "empty label");
    }
    const auto key = std::make_pair(f[0], f[1]);
    if (const auto it = pairs.find(key); it != pairs.end()) {
      fail(ErrorKind::DuplicatePair, parse_where(line_no) + "duplicate pair (" + f[0] +
                                         ", " + f[1] + "), first seen on line " +
                                         std::to_string(it->second));
    }
    pairs.emplace(key, line_no);

    LongFormDataset::Row row{f[0], f[1], {}};
    row.values.reserve(data.value_names.size());
    for (std::size_t c = 2; c < f.size(); ++c) row.values.push_back(parse_number(f[c], line_no));
    if (!seen_a[row.a]) {
      seen_a[row.a] = true;
      data.a_labels.push_back(row.a);
    }
    if (!seen_b[row.b]) {
      seen_b[row.b] = true;
      data.b_labels.push_back(row.b);
    }
    data.rows.push_back(std::move(row));
  }
  if (!have_header) fail(ErrorKind::ParseError, "empty file");
  return data;
}

void write_csv(std::ostream& out, const LongFormDataset& data) {
  out << "a_id,b_id";
  for (const auto& n : data.value_names) out << ',' << n;
  out << '\n';
  for (const auto& r : data.rows) {
    out << r.a << ',' << r.b;
    for (double v : r.values) out << ',' << format_double(v);
    out << '\n';
  }
}

std::pair<LongFormDataset, IncompleteTensor> load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ParseError, "cannot open '" + path + "'");
  LongFormDataset data = read_csv(in);
  IncompleteTensor tensor = data.to_tensor();
  return {std::move(data), std::move(tensor)};
}

void save_csv(const std::string& path, const LongFormDataset& data) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::InvalidArgument, "cannot write '" + path + "'");
  write_csv(out, data);
}

}  // namespace gsi
