#pragma once

#include <string>
#include <vector>

#include "dpaudit/dataset.hpp"

namespace dpaudit {

// Configuration-driven binarization for raw survey CSVs. A recipe is a JSON
// document describing how to derive binary attributes from raw columns:
//
// {
//   "columns": ["age", ...],            // optional: header for headerless files
//   "label": {"column": "two_year_recid",
//             "positive_values": ["1"],  // or "type": "int" for class ids
//             "strip_trailing_dot": false},
//   "features": [
//     {"name": "male", "column": "sex", "equals": ["Male"]},
//     {"name": "juv_fel", "column": "juv_fel_count", "greater_than": 0},
//     {"name": "age", "column": "age", "bins": [25, 46],
//      "bin_names": ["lt25", "25to45", "gt45"]},
//     {"name": "race", "column": "race", "buckets": [
//        {"name": "aa", "values": ["African-American"]},
//        {"name": "other", "rest": true}]}
//   ]
// }
//
// "equals"/"greater_than" yield single free flags; "bins" (numeric, edges
// sorted ascending, value in bin i when edges[i-1] <= v < edges[i]) and
// "buckets" (categorical, at most one catch-all "rest") yield one-hot groups.
BinaryDataset apply_recipe(const std::vector<std::string>& csv_paths,
                           const std::string& recipe_json);

BinaryDataset apply_recipe_file(const std::vector<std::string>& csv_paths,
                                const std::string& recipe_path);

}  // namespace dpaudit
