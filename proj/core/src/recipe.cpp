#include "dpaudit/recipe.hpp"

#include <algorithm>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "dpaudit/csv.hpp"
#include "dpaudit/serialize.hpp"

namespace dpaudit {

using nlohmann::json;

namespace {

double to_number(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("non-numeric cell: " + s);
  return v;
}

}  // namespace

BinaryDataset apply_recipe(const std::vector<std::string>& csv_paths,
                           const std::string& recipe_json) {
  const json recipe = json::parse(recipe_json);
  CsvTable table;
  if (recipe.contains("columns")) {
    table = read_csv_with_header(csv_paths,
                                 recipe.at("columns").get<std::vector<std::string>>());
  } else {
    if (csv_paths.size() != 1) {
      throw std::invalid_argument("multiple csv files need an explicit header");
    }
    table = read_csv(csv_paths[0]);
  }

  const json& label = recipe.at("label");
  const int label_col = table.column(label.at("column").get<std::string>());
  if (label_col < 0) throw std::invalid_argument("label column not found");
  const bool strip_dot = label.value("strip_trailing_dot", false);
  std::vector<std::string> positive;
  if (label.contains("positive_values")) {
    positive = label.at("positive_values").get<std::vector<std::string>>();
  }

  BinaryDataset out;
  struct Emit {
    int column;
    enum class Kind { equals, greater_than, bins, buckets } kind;
    std::vector<std::string> equals;
    double threshold = 0;
    std::vector<double> edges;
    std::vector<std::vector<std::string>> bucket_values;  // empty = rest
  };
  std::vector<Emit> emits;
  for (const json& f : recipe.at("features")) {
    Emit e;
    const std::string column = f.at("column").get<std::string>();
    e.column = table.column(column);
    if (e.column < 0) throw std::invalid_argument("feature column not found: " + column);
    const std::string name = f.at("name").get<std::string>();
    if (f.contains("equals")) {
      e.kind = Emit::Kind::equals;
      e.equals = f.at("equals").get<std::vector<std::string>>();
      out.feature_names.push_back(name);
    } else if (f.contains("greater_than")) {
      e.kind = Emit::Kind::greater_than;
      e.threshold = f.at("greater_than").get<double>();
      out.feature_names.push_back(name);
    } else if (f.contains("bins")) {
      e.kind = Emit::Kind::bins;
      e.edges = f.at("bins").get<std::vector<double>>();
      if (!std::is_sorted(e.edges.begin(), e.edges.end())) {
        throw std::invalid_argument("bin edges must be ascending: " + name);
      }
      std::vector<std::string> bin_names;
      if (f.contains("bin_names")) {
        bin_names = f.at("bin_names").get<std::vector<std::string>>();
        if (bin_names.size() != e.edges.size() + 1) {
          throw std::invalid_argument("bin_names size mismatch: " + name);
        }
      }
      OneHotGroup group;
      for (std::size_t b = 0; b <= e.edges.size(); ++b) {
        group.push_back(static_cast<int>(out.feature_names.size()));
        out.feature_names.push_back(
            name + "=" + (bin_names.empty() ? "bin" + std::to_string(b) : bin_names[b]));
      }
      out.groups.push_back(group);
    } else if (f.contains("buckets")) {
      e.kind = Emit::Kind::buckets;
      OneHotGroup group;
      int rest_count = 0;
      for (const json& bucket : f.at("buckets")) {
        group.push_back(static_cast<int>(out.feature_names.size()));
        out.feature_names.push_back(name + "=" + bucket.at("name").get<std::string>());
        if (bucket.value("rest", false)) {
          ++rest_count;
          e.bucket_values.emplace_back();  // catch-all marker
        } else {
          e.bucket_values.push_back(
              bucket.at("values").get<std::vector<std::string>>());
        }
      }
      if (rest_count > 1) throw std::invalid_argument("multiple rest buckets: " + name);
      if (rest_count == 1 && !e.bucket_values.back().empty()) {
        throw std::invalid_argument("rest bucket must be last: " + name);
      }
      out.groups.push_back(group);
    } else {
      throw std::invalid_argument("feature needs equals/greater_than/bins/buckets: " + name);
    }
    emits.push_back(std::move(e));
  }

  int max_label = 0;
  for (const auto& row : table.rows) {
    std::vector<std::uint8_t> bits;
    for (const auto& e : emits) {
      const std::string& cell = row[static_cast<std::size_t>(e.column)];
      switch (e.kind) {
        case Emit::Kind::equals: {
          const bool hit =
              std::find(e.equals.begin(), e.equals.end(), cell) != e.equals.end();
          bits.push_back(hit ? 1 : 0);
          break;
        }
        case Emit::Kind::greater_than:
          bits.push_back(to_number(cell) > e.threshold ? 1 : 0);
          break;
        case Emit::Kind::bins: {
          const double v = to_number(cell);
          std::size_t bin = e.edges.size();
          for (std::size_t b = 0; b < e.edges.size(); ++b) {
            if (v < e.edges[b]) {
              bin = b;
              break;
            }
          }
          for (std::size_t b = 0; b <= e.edges.size(); ++b) {
            bits.push_back(b == bin ? 1 : 0);
          }
          break;
        }
        case Emit::Kind::buckets: {
          std::size_t hit = e.bucket_values.size();
          for (std::size_t b = 0; b < e.bucket_values.size(); ++b) {
            const auto& values = e.bucket_values[b];
            if (values.empty()) {
              if (hit == e.bucket_values.size()) hit = b;  // rest, if nothing matched
            } else if (std::find(values.begin(), values.end(), cell) != values.end()) {
              hit = b;
              break;
            }
          }
          if (hit == e.bucket_values.size()) {
            throw std::invalid_argument("value matches no bucket: '" + cell + "'");
          }
          for (std::size_t b = 0; b < e.bucket_values.size(); ++b) {
            bits.push_back(b == hit ? 1 : 0);
          }
          break;
        }
      }
    }
    std::string cell = row[static_cast<std::size_t>(label_col)];
    if (strip_dot && !cell.empty() && cell.back() == '.') cell.pop_back();
    int y;
    if (!positive.empty()) {
      y = std::find(positive.begin(), positive.end(), cell) != positive.end() ? 1 : 0;
    } else {
      try {
        std::size_t pos = 0;
        const long long v = std::stoll(cell, &pos);
        if (pos != cell.size() || v < 0) throw std::invalid_argument(cell);
        y = static_cast<int>(v);
      } catch (...) {
        throw std::invalid_argument("unknown label value: '" + cell + "'");
      }
    }
    max_label = std::max(max_label, y);
    out.rows.push_back(std::move(bits));
    out.labels.push_back(y);
  }
  out.num_classes = std::max(2, max_label + 1);
  out.validate();
  return out;
}

BinaryDataset apply_recipe_file(const std::vector<std::string>& csv_paths,
                                const std::string& recipe_path) {
  return apply_recipe(csv_paths, read_text_file(recipe_path));
}

}  // namespace dpaudit
