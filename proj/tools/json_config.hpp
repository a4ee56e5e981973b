#pragma once

// CLI11 config reader for JSON files. Top-level keys map to options of the
// main app; an object value keyed by a subcommand name maps to that
// subcommand's options. Arrays become repeated values.

#include <CLI11.hpp>
#include <json.hpp>

namespace dtinspect::cli {

class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App *, bool, bool, std::string) const override {
    return "{}\n";
  }

  std::vector<CLI::ConfigItem> from_config(std::istream &in) const override {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
      throw CLI::ConversionError(std::string("config file: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config file: top level must be an object");
    std::vector<CLI::ConfigItem> items;
    Collect(j, {}, items);
    return items;
  }

 private:
  static std::string Scalar(const nlohmann::json &v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void Collect(const nlohmann::json &obj, const std::vector<std::string> &parents,
                      std::vector<CLI::ConfigItem> &items) {
    for (const auto &[key, value] : obj.items()) {
      if (value.is_object()) {
        auto next = parents;
        next.push_back(key);
        Collect(value, next, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto &v : value) item.inputs.push_back(Scalar(v));
      } else {
        item.inputs.push_back(Scalar(value));
      }
      items.push_back(std::move(item));
    }
  }
};

}  // namespace dtinspect::cli
