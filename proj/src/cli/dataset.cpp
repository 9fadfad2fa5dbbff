//
// Copyright 2026 The phrase-attack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "phrase_attack/cli/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>

#include "phrase_attack/error.hpp"

namespace phrase_attack::cli {
namespace {

using Json = nlohmann::json;

std::string Where(std::size_t line_number) {
  return "line " + std::to_string(line_number) + ": ";
}

std::string ScalarField(const Json& record, const char* key,
                        std::size_t line_number) {
  if (!record.contains(key)) {
    throw Error(ErrorCode::kParseError,
                Where(line_number) + "missing field '" + key + "'");
  }
  const Json& value = record[key];
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return std::to_string(value.get<long long>());
  throw Error(ErrorCode::kParseError, Where(line_number) + "field '" + key +
                                          "' must be a string or integer");
}

std::optional<std::string> OptionalTree(const Json& record, const char* key,
                                        std::size_t line_number) {
  if (!record.contains(key) || record[key].is_null()) return std::nullopt;
  if (!record[key].is_string()) {
    throw Error(ErrorCode::kParseError,
                Where(line_number) + "field '" + key + "' must be a string");
  }
  return record[key].get<std::string>();
}

TokenSequence TextField(const Json& record, const char* key,
                        std::size_t line_number) {
  if (!record.contains(key) || !record[key].is_string()) {
    throw Error(ErrorCode::kParseError,
                Where(line_number) + "missing string field '" + key + "'");
  }
  try {
    return Tokenize(record[key].get<std::string>());
  } catch (const Error& e) {
    throw Error(ErrorCode::kParseError, Where(line_number) + e.what());
  }
}

}  // namespace

LabeledExample ExampleFromJson(const Json& record, const LabelSet& labels,
                               std::size_t line_number) {
  if (!record.is_object()) {
    throw Error(ErrorCode::kParseError,
                Where(line_number) + "record is not an object");
  }
  LabeledExample example;
  example.id = ScalarField(record, "id", line_number);
  if (record.contains("text")) {
    example.segments = {TextField(record, "text", line_number)};
    example.trees = {OptionalTree(record, "tree", line_number)};
  } else if (record.contains("premise") || record.contains("hypothesis")) {
    example.segments = {TextField(record, "premise", line_number),
                        TextField(record, "hypothesis", line_number)};
    example.trees = {OptionalTree(record, "premise_tree", line_number),
                     OptionalTree(record, "hypothesis_tree", line_number)};
  } else {
    throw Error(ErrorCode::kParseError,
                Where(line_number) + "needs 'text' or 'premise'/'hypothesis'");
  }
  const std::string label = ScalarField(record, "label", line_number);
  try {
    example.gold = labels.Resolve(label);
  } catch (const Error& e) {
    throw Error(e.code(), Where(line_number) + e.detail());
  }
  example.attack_segment = ChooseAttackSegment(example);
  return example;
}

std::vector<std::size_t> SampleIndices(std::size_t population,
                                       std::size_t limit, std::uint64_t seed) {
  std::vector<std::size_t> indices(population);
  std::iota(indices.begin(), indices.end(), 0);
  if (limit >= population) return indices;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < limit; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (population - i));
    std::swap(indices[i], indices[j]);
  }
  indices.resize(limit);
  std::sort(indices.begin(), indices.end());
  return indices;
}

std::vector<LabeledExample> LoadDataset(const std::filesystem::path& path,
                                        const LabelSet& labels,
                                        std::size_t limit, std::uint64_t seed,
                                        std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open " + path.string());
  std::vector<LabeledExample> all;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const Json record = Json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (record.is_discarded()) {
      throw Error(ErrorCode::kParseError,
                  Where(line_number) + "not valid JSON");
    }
    all.push_back(ExampleFromJson(record, labels, line_number));
  }
  if (limit > all.size() && warnings) {
    warnings->push_back("limit " + std::to_string(limit) + " exceeds the " +
                        std::to_string(all.size()) + " records of " +
                        path.string() + "; using all of them");
  }
  std::vector<LabeledExample> out;
  for (const std::size_t i : SampleIndices(all.size(), limit, seed)) {
    out.push_back(std::move(all[i]));
  }
  return out;
}

}  // namespace phrase_attack::cli
