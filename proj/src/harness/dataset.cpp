#include "aia/harness/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "aia/engine.hpp"

namespace aia {

using nlohmann::json;

Dataset Dataset::from_instances(std::string name, std::vector<PartedInstance> instances,
                                std::optional<std::size_t> num_classes) {
  if (instances.empty()) throw std::invalid_argument("dataset '" + name + "' is empty");
  Dataset d;
  d.name = std::move(name);
  d.num_parts = instances.front().num_parts();
  std::size_t max_label = 0;
  for (const auto& inst : instances) {
    if (inst.num_parts() != d.num_parts) {
      throw std::invalid_argument("instance '" + inst.id + "' has " +
                                  std::to_string(inst.num_parts()) + " parts, expected " +
                                  std::to_string(d.num_parts));
    }
    if (inst.num_parts() == 0) throw std::invalid_argument("instance '" + inst.id + "' has no parts");
    max_label = std::max(max_label, inst.label);
  }
  d.num_classes = num_classes.value_or(std::max<std::size_t>(max_label + 1, 2));
  d.instances = std::move(instances);
  d.prior = empirical_prior(d.instances, d.num_classes);
  return d;
}

namespace {

PartedInstance parse_instance(const json& obj) {
  PartedInstance inst;
  if (!obj.is_object()) throw std::runtime_error("expected a JSON object");
  inst.id = obj.at("id").get<std::string>();
  const auto& label = obj.at("label");
  if (!label.is_number_integer() || label.get<long long>() < 0) {
    throw std::runtime_error("label must be a non-negative integer");
  }
  inst.label = label.get<std::size_t>();
  if (auto it = obj.find("difficulty"); it != obj.end() && !it->is_null()) {
    const auto level = it->get<std::string>();
    if (level == "easy") {
      inst.difficulty = Difficulty::easy;
    } else if (level == "hard") {
      inst.difficulty = Difficulty::hard;
    } else {
      throw std::runtime_error("difficulty must be \"easy\" or \"hard\"");
    }
  }
  const auto& parts = obj.at("parts");
  if (!parts.is_array() || parts.empty()) throw std::runtime_error("parts must be a non-empty array");
  for (const auto& bag : parts) {
    if (!bag.is_array()) throw std::runtime_error("each part must be an array of [index, weight]");
    FeatureBag features;
    features.reserve(bag.size());
    for (const auto& pair : bag) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_unsigned() ||
          !pair[1].is_number()) {
        throw std::runtime_error("features must be [non-negative index, weight] pairs");
      }
      const auto index = pair[0].get<std::uint64_t>();
      if (index > 0xffffffffULL) throw std::runtime_error("feature index exceeds 32 bits");
      features.push_back({static_cast<std::uint32_t>(index), pair[1].get<double>()});
    }
    inst.parts.push_back(std::move(features));
  }
  return inst;
}

}  // namespace

Dataset read_jsonl(std::istream& in, const std::string& name,
                   std::optional<std::size_t> num_classes) {
  std::vector<PartedInstance> instances;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      instances.push_back(parse_instance(json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error(name + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (instances.empty()) throw std::runtime_error(name + ": no instances");
  try {
    return Dataset::from_instances(name, std::move(instances), num_classes);
  } catch (const std::exception& e) {
    throw std::runtime_error(name + ": " + e.what());
  }
}

Dataset load_jsonl(const std::filesystem::path& path, std::optional<std::size_t> num_classes) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_jsonl(in, path.string(), num_classes);
}

void write_jsonl(std::ostream& out, const Dataset& dataset) {
  for (const auto& inst : dataset.instances) {
    json obj;
    obj["id"] = inst.id;
    obj["label"] = inst.label;
    if (inst.difficulty) obj["difficulty"] = *inst.difficulty == Difficulty::easy ? "easy" : "hard";
    json parts = json::array();
    for (const auto& bag : inst.parts) {
      json features = json::array();
      for (const auto& f : bag) features.push_back(json::array({f.index, f.weight}));
      parts.push_back(std::move(features));
    }
    obj["parts"] = std::move(parts);
    out << obj.dump() << '\n';
  }
}

void save_jsonl(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_jsonl(out, dataset);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace aia
