#include "dpaudit/dataset.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "dpaudit/csv.hpp"
#include "dpaudit/rng.hpp"

namespace dpaudit {

void BinaryDataset::validate() const {
  if (num_classes < 1) throw std::invalid_argument("num_classes must be >= 1");
  if (rows.size() != labels.size()) {
    throw std::invalid_argument("rows/labels size mismatch");
  }
  const std::size_t width = rows.empty() ? 0 : rows[0].size();
  for (const auto& row : rows) {
    if (row.size() != width) throw std::invalid_argument("ragged row");
    for (auto v : row) {
      if (v > 1) throw std::invalid_argument("non-binary cell");
    }
  }
  for (int label : labels) {
    if (label < 0 || label >= num_classes) {
      throw std::invalid_argument("label out of range");
    }
  }
  for (const auto& group : groups) {
    for (int idx : group) {
      if (idx < 0 || idx >= static_cast<int>(width)) {
        throw std::invalid_argument("group index out of range");
      }
    }
    for (const auto& row : rows) {
      int sum = 0;
      for (int idx : group) sum += row[static_cast<std::size_t>(idx)];
      if (sum != 1) throw std::invalid_argument("one-hot group violation");
    }
  }
  if (!feature_names.empty() && feature_names.size() != width) {
    throw std::invalid_argument("feature_names size mismatch");
  }
}

namespace {

long long parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (...) {
    throw std::invalid_argument("unknown " + what + " value: '" + s + "'");
  }
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (...) {
    throw std::invalid_argument("non-numeric " + what + " value: '" + s + "'");
  }
}

}  // namespace

BinaryDataset load_csv(const std::string& path, const std::string& label_column,
                       const std::vector<ColumnSpec>& declared) {
  const CsvTable table = read_csv(path);
  const int label_idx = table.column(label_column);
  if (label_idx < 0) {
    throw std::invalid_argument("label column not found: " + label_column);
  }

  auto find_spec = [&](const std::string& name) -> const ColumnSpec* {
    for (const auto& spec : declared) {
      if (spec.column == name) return &spec;
    }
    return nullptr;
  };

  // First-seen level order per categorical column.
  std::vector<std::vector<std::string>> levels(table.header.size());
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    const ColumnSpec* spec = find_spec(table.header[c]);
    if (static_cast<int>(c) == label_idx || spec == nullptr ||
        spec->kind != ColumnSpec::Kind::categorical) {
      continue;
    }
    for (const auto& row : table.rows) {
      const std::string& v = row[c];
      if (std::find(levels[c].begin(), levels[c].end(), v) == levels[c].end()) {
        levels[c].push_back(v);
      }
    }
  }

  BinaryDataset out;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (static_cast<int>(c) == label_idx) continue;
    const std::string& name = table.header[c];
    const ColumnSpec* spec = find_spec(name);
    if (spec == nullptr) {
      out.feature_names.push_back(name);
    } else if (spec->kind == ColumnSpec::Kind::categorical) {
      OneHotGroup group;
      for (const auto& level : levels[c]) {
        group.push_back(static_cast<int>(out.feature_names.size()));
        out.feature_names.push_back(name + "=" + level);
      }
      if (group.size() > 1) out.groups.push_back(group);
    } else {
      OneHotGroup group;
      for (std::size_t b = 0; b <= spec->bin_edges.size(); ++b) {
        group.push_back(static_cast<int>(out.feature_names.size()));
        out.feature_names.push_back(name + "#bin" + std::to_string(b));
      }
      if (group.size() > 1) out.groups.push_back(group);
    }
  }

  const int m = static_cast<int>(out.feature_names.size());
  int max_label = 0;
  for (const auto& row : table.rows) {
    std::vector<std::uint8_t> bits;
    bits.reserve(static_cast<std::size_t>(m));
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (static_cast<int>(c) == label_idx) continue;
      const std::string& name = table.header[c];
      const ColumnSpec* spec = find_spec(name);
      if (spec == nullptr) {
        if (row[c] == "0") {
          bits.push_back(0);
        } else if (row[c] == "1") {
          bits.push_back(1);
        } else {
          throw std::invalid_argument("non-binary cell '" + row[c] +
                                      "' in undeclared column " + name);
        }
      } else if (spec->kind == ColumnSpec::Kind::categorical) {
        for (const auto& level : levels[c]) {
          bits.push_back(row[c] == level ? 1 : 0);
        }
      } else {
        const double v = parse_double(row[c], "continuous");
        std::size_t bin = spec->bin_edges.size();
        for (std::size_t b = 0; b < spec->bin_edges.size(); ++b) {
          if (v < spec->bin_edges[b]) {
            bin = b;
            break;
          }
        }
        for (std::size_t b = 0; b <= spec->bin_edges.size(); ++b) {
          bits.push_back(b == bin ? 1 : 0);
        }
      }
    }
    const long long label = parse_int(row[static_cast<std::size_t>(label_idx)], "label");
    if (label < 0) throw std::invalid_argument("unknown label value: negative");
    max_label = std::max(max_label, static_cast<int>(label));
    out.rows.push_back(std::move(bits));
    out.labels.push_back(static_cast<int>(label));
  }

  out.num_classes = std::max(2, max_label + 1);
  out.validate();
  return out;
}

TrainHeldoutSplit sample_training_set(const BinaryDataset& dataset, int n,
                                      std::uint64_t seed) {
  if (n < 0 || n > dataset.n()) {
    throw std::invalid_argument("sample size exceeds dataset size");
  }
  std::vector<int> order(static_cast<std::size_t>(dataset.n()));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  Rng rng(Rng::derive(seed, {0x5a3b9e01}));
  // Partial Fisher-Yates: the first n slots become the sample.
  for (int i = 0; i < n; ++i) {
    const auto j =
        i + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(dataset.n() - i)));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  TrainHeldoutSplit split;
  auto copy_meta = [&](BinaryDataset& d) {
    d.num_classes = dataset.num_classes;
    d.groups = dataset.groups;
    d.feature_names = dataset.feature_names;
  };
  copy_meta(split.train);
  copy_meta(split.heldout);
  for (int i = 0; i < dataset.n(); ++i) {
    const auto src = static_cast<std::size_t>(order[static_cast<std::size_t>(i)]);
    BinaryDataset& dst = i < n ? split.train : split.heldout;
    dst.rows.push_back(dataset.rows[src]);
    dst.labels.push_back(dataset.labels[src]);
  }
  return split;
}

BinaryDataset generate_synthetic(int m_features, int n_rows,
                                 double class_balance,
                                 const std::vector<int>& group_layout,
                                 std::uint64_t seed) {
  if (m_features < 1 || n_rows < 0) {
    throw std::invalid_argument("invalid synthetic dimensions");
  }
  if (!(class_balance > 0 && class_balance < 1)) {
    throw std::invalid_argument("class_balance must be in (0, 1)");
  }
  int grouped = 0;
  for (int size : group_layout) {
    if (size < 2) throw std::invalid_argument("group size must be >= 2");
    grouped += size;
  }
  if (grouped > m_features) {
    throw std::invalid_argument("group layout exceeds feature count");
  }

  BinaryDataset out;
  out.num_classes = 2;
  int next = 0;
  for (int size : group_layout) {
    OneHotGroup group;
    for (int i = 0; i < size; ++i) group.push_back(next++);
    out.groups.push_back(group);
  }

  // The per-class distribution is a fixed function of the layout: free bit j
  // has P(1|c) = 0.8 when (j + c) is even else 0.2, and group members get
  // weights 1 + ((member + c) mod size). Classes are therefore separable while
  // staying reproducible for any seed.
  Rng rng(Rng::derive(seed, {0x11d5c3a7}));
  for (int k = 0; k < n_rows; ++k) {
    const int c = rng.uniform_double() < class_balance ? 1 : 0;
    std::vector<std::uint8_t> row(static_cast<std::size_t>(m_features), 0);
    for (const auto& group : out.groups) {
      const int size = static_cast<int>(group.size());
      int total = 0;
      for (int i = 0; i < size; ++i) total += 1 + (i + c) % size;
      long long pick = static_cast<long long>(rng.uniform_int(static_cast<std::uint64_t>(total)));
      for (int i = 0; i < size; ++i) {
        pick -= 1 + (i + c) % size;
        if (pick < 0) {
          row[static_cast<std::size_t>(group[static_cast<std::size_t>(i)])] = 1;
          break;
        }
      }
    }
    for (int j = grouped; j < m_features; ++j) {
      const double p = (j + c) % 2 == 0 ? 0.8 : 0.2;
      row[static_cast<std::size_t>(j)] = rng.uniform_double() < p ? 1 : 0;
    }
    out.rows.push_back(std::move(row));
    out.labels.push_back(c);
  }
  out.validate();
  return out;
}

}  // namespace dpaudit
