#pragma once

#include <map>
#include <string>

namespace sectk {

// Line-oriented `key = value` configuration with optional `[section]`
// headers; section keys are flattened to `section.key`.
class RunConfig {
  public:
    static RunConfig parse(const std::string& content);
    static RunConfig load(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) > 0; }
    std::string get(const std::string& key, const std::string& fallback = "") const;
    long get_int(const std::string& key, long fallback) const;
    double get_double(const std::string& key, double fallback) const;

    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    // Fully-resolved `key = value` dump, for run manifests.
    std::string serialize() const;

  private:
    std::map<std::string, std::string> values_;
};

}  // namespace sectk
