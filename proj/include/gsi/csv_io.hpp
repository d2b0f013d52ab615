#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "gsi/format.hpp"
#include "gsi/tensor.hpp"

namespace gsi {

/// Long-form interaction table: one row per observed (a, b) pair.
/// Labels are listed in order of first appearance in `rows` and that order
/// defines tensor indices.
struct LongFormDataset {
  struct Row {
    std::string a;
    std::string b;
    std::vector<double> values;
    bool operator==(const Row&) const = default;
  };

  std::vector<std::string> value_names;  // header columns after a_id,b_id
  std::vector<std::string> a_labels;
  std::vector<std::string> b_labels;
  std::vector<Row> rows;

  Index dim() const noexcept { return value_names.size(); }
  bool operator==(const LongFormDataset&) const = default;

  Index a_index(const std::string& label) const;  // throws InvalidArgument
  Index b_index(const std::string& label) const;

  IncompleteTensor to_tensor() const;
  /// Observed cells of `tensor` in row-major order with the given labels.
  static LongFormDataset from_tensor(const IncompleteTensor& tensor,
                                     std::vector<std::string> a_labels,
                                     std::vector<std::string> b_labels);
  /// Keeps only rows whose A label is listed; label order follows `keep`.
  LongFormDataset restrict_a(const std::vector<std::string>& keep) const;
};

/// Throws ParseError (malformed row, inconsistent dim, bad number) or
/// DuplicatePair.
LongFormDataset read_csv(std::istream& in);
void write_csv(std::ostream& out, const LongFormDataset& data);

std::pair<LongFormDataset, IncompleteTensor> load_csv(const std::string& path);
void save_csv(const std::string& path, const LongFormDataset& data);

}  // namespace gsi
