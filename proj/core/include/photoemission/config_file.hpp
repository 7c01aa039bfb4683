#ifndef PHOTOEMISSION_CONFIG_FILE_HPP
#define PHOTOEMISSION_CONFIG_FILE_HPP

#include <map>
#include <string>
#include <vector>

namespace pem {

// Flat key = value configuration file. '#' and ';' start comments, blank
// lines and [section] headers are ignored, keys are case-sensitive.
class ConfigFile {
public:
    ConfigFile() = default;
    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_string(const std::string& text);

    bool has(const std::string& key) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    // Comma-separated list of numbers.
    std::vector<double> get_list(const std::string& key) const;

    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

} // namespace pem

#endif
