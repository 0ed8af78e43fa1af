// qdpair command-line front end.
//
//   qdpair sweep --config configs/fig1.conf --output fig1.csv
//   qdpair sweep --config configs/fig1.conf --gamma-pn 0 --output fig2.csv
//   qdpair validate

#include <qdpair/cli/commands.hpp>
#include <qdpair/cli/config.hpp>

#include "CLI11.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

int main(int argc, char** argv)
{
    using namespace qdpair;

    CLI::App app{"Laser-driven dipole-coupled emitter pair with photon and phonon reservoirs"};
    app.set_version_flag("--version", std::string(kVersion));

    std::string command;
    std::string config_path;
    std::string metadata_path;
    std::vector<std::string> sets;
    app.add_option("command", command, "steady | evolve | sweep | limits | convert | validate");
    app.add_option("--config", config_path, "flat key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("--from-metadata", metadata_path, "re-run the config embedded in a sweep metadata sidecar")
        ->check(CLI::ExistingFile)
        ->excludes("--config");
    app.add_option("--set", sets, "extra key=value override (repeatable)");

    // one flag per overridable key; values stay as text so configs round-trip verbatim
    const std::vector<std::pair<std::string, std::string>> flags{
        {"output", "output file"},
        {"format", "csv or json"},
        {"gamma", "single-emitter decay rate (unit of all rates)"},
        {"chi_r", "radiative coupling in [0, 1]"},
        {"omega_dd", "signed dipole-dipole shift"},
        {"gamma_pn", "phonon-induced s <-> a decay rate"},
        {"n_bar", "mean thermal phonon number"},
        {"rabi", "Rabi frequency"},
        {"detuning", "detuning"},
    };
    std::map<std::string, std::optional<std::string>> values;
    for (const auto& [key, help] : flags) {
        std::string flag = "--" + key;
        std::replace(flag.begin(), flag.end(), '_', '-');
        app.add_option(flag, values[key], help);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        std::string text;
        cli::Entries overrides;
        if (!config_path.empty()) {
            text = cli::read_file(config_path);
        }
        else if (!metadata_path.empty()) {
            text = cli::to_text(cli::entries_from_metadata(cli::read_file(metadata_path)));
        }
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos)
                throw cli::ConfigError("--set expects key=value, got '" + s + "'");
            overrides[std::string(cli::trim(s.substr(0, eq)))] = std::string(cli::trim(s.substr(eq + 1)));
        }
        for (const auto& [key, v] : values)
            if (v)
                overrides[key] = *v;
        if (!command.empty())
            overrides["command"] = command;

        const cli::RunConfig cfg = cli::parse_config(text, overrides);
        return cli::run(cfg, std::cout, std::cerr);
    }
    catch (const cli::ConfigError& ex) {
        std::cerr << "config error: " << ex.what() << '\n';
        return 2;
    }
    catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
}
