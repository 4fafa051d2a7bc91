#include "cli_common.hpp"

#include <nlohmann/json.hpp>

#include <charconv>

namespace finsight::cli {

void require_input(const std::filesystem::path& p, bool dir) {
    std::error_code ec;
    const bool ok = dir ? std::filesystem::is_directory(p, ec) : std::filesystem::is_regular_file(p, ec);
    if (!ok)
        throw CliError(Exit::no_input, (dir ? "no such directory: " : "no such file: ") + p.string());
}

std::string format_number(double v) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 10);
    if (ec != std::errc{})
        return std::to_string(v);
    return std::string(buf, end);
}

namespace {

void flatten(const nlohmann::json& j, std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& out) {
    for (const auto& [key, value] : j.items()) {
        if (value.is_object()) {
            parents.push_back(key);
            flatten(value, parents, out);
            parents.pop_back();
            continue;
        }
        CLI::ConfigItem item;
        item.parents = parents;
        item.name = key;
        auto text = [](const nlohmann::json& v) {
            if (v.is_string())
                return v.get<std::string>();
            if (v.is_boolean())
                return std::string(v.get<bool>() ? "true" : "false");
            return v.dump();
        };
        if (value.is_array())
            for (const auto& v : value)
                item.inputs.push_back(text(v));
        else
            item.inputs.push_back(text(value));
        out.push_back(std::move(item));
    }
}

} // namespace

std::vector<CLI::ConfigItem> JsonConfig::from_config(std::istream& input) const {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(input);
    } catch (const nlohmann::json::parse_error& e) {
        throw CliError(Exit::data_error, std::string("config: ") + e.what());
    }
    if (!j.is_object())
        throw CliError(Exit::data_error, "config: expected a JSON object");
    std::vector<CLI::ConfigItem> items;
    std::vector<std::string> parents;
    flatten(j, parents, items);
    return items;
}

std::string JsonConfig::to_config(const CLI::App* app, bool default_also, bool, std::string) const {
    nlohmann::ordered_json j;
    for (const CLI::Option* opt : app->get_options({})) {
        if (opt->get_lnames().empty() || !opt->get_configurable())
            continue;
        const std::string name = opt->get_lnames()[0];
        if (opt->count() > 0) {
            const auto& res = opt->results();
            j[name] = res.size() == 1 ? nlohmann::ordered_json(res[0]) : nlohmann::ordered_json(res);
        } else if (default_also && !opt->get_default_str().empty()) {
            j[name] = opt->get_default_str();
        }
    }
    for (const CLI::App* sub : app->get_subcommands({})) {
        const std::string text = to_config(sub, default_also, false, "");
        const auto nested = nlohmann::ordered_json::parse(text);
        if (!nested.empty())
            j[sub->get_name()] = nested;
    }
    return j.dump(2);
}

} // namespace finsight::cli
