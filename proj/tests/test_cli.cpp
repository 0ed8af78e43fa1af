#include <qdpair/cli/commands.hpp>
#include <qdpair/cli/config.hpp>
#include <qdpair/cli/output.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <string>

using namespace qdpair;
using namespace qdpair::cli;

namespace fs = std::filesystem;

namespace
{

const std::string kSweepConfig = "command = sweep\n"
                                 "output = out.csv\n"
                                 "# phonon channel on\n"
                                 "gamma_pn = 3\n"
                                 "omega_dd = 15\n"
                                 "chi_r = 0.9\n"
                                 "n_bar = 0.05\n";

class TempDir
{
public:
    TempDir()
    {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        path_ = fs::temp_directory_path() / (std::string("qdpair_") + info->test_suite_name() + "_" + info->name());
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

std::string error_of(const std::string& text, const Entries& overrides = {})
{
    try {
        parse_config(text, overrides);
    }
    catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

std::vector<std::string> lines_of(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string line; std::getline(is, line);)
        out.push_back(line);
    return out;
}

} // namespace

TEST(ParseConfig, SweepWithPhonons)
{
    const RunConfig cfg = parse_config(kSweepConfig);
    EXPECT_EQ(cfg.command, Command::sweep);
    EXPECT_EQ(cfg.output_path, "out.csv");
    EXPECT_EQ(cfg.format, Format::csv);
    EXPECT_EQ(cfg.params.gamma, 1.0);
    EXPECT_EQ(cfg.params.gamma_pn, 3.0);
    EXPECT_EQ(cfg.params.omega_dd, 15.0);
    EXPECT_EQ(cfg.params.chi_r, 0.9);
    EXPECT_EQ(cfg.params.n_bar, 0.05);
    ASSERT_TRUE(cfg.grid.has_value());
    EXPECT_EQ(cfg.grid->detuning, (Range{-40.0, 40.0, 161}));
    EXPECT_EQ(cfg.grid->rabi, (Range{0.25, 10.0, 41}));
    EXPECT_EQ(cfg.grid->base, cfg.params);
}

TEST(ParseConfig, OverrideSwitchesPhononsOff)
{
    const RunConfig cfg = parse_config(kSweepConfig, {{"gamma_pn", "0"}});
    EXPECT_EQ(cfg.params.gamma_pn, 0.0);
    EXPECT_EQ(cfg.grid->base.gamma_pn, 0.0);
    EXPECT_EQ(cfg.entries.at("gamma_pn"), "0");
    EXPECT_EQ(cfg.params.chi_r, 0.9);
}

TEST(ParseConfig, RangeErrorNamesKeyAndInterval)
{
    const std::string msg = error_of(kSweepConfig, {{"chi_r", "1.5"}});
    EXPECT_NE(msg.find("chi_r"), std::string::npos) << msg;
    EXPECT_NE(msg.find("[0, 1]"), std::string::npos) << msg;
    EXPECT_NE(error_of(kSweepConfig, {{"n_bar", "-1"}}).find("n_bar"), std::string::npos);
    EXPECT_NE(error_of(kSweepConfig, {{"rabi_count", "0"}}).find("rabi_count"), std::string::npos);
}

TEST(ParseConfig, UnknownKeysAreErrors)
{
    EXPECT_NE(error_of(kSweepConfig + "chi = 0.5\n").find("unknown key 'chi'"), std::string::npos);
    EXPECT_NE(error_of(kSweepConfig, {{"bogus", "1"}}).find("bogus"), std::string::npos);
}

TEST(ParseConfig, MissingKeysAreNamed)
{
    EXPECT_NE(error_of("command = steady\noutput = x.csv\nchi_r = 0.9\n").find("'omega_dd'"), std::string::npos);
    EXPECT_NE(error_of("chi_r = 0.9\n").find("'command'"), std::string::npos);
    EXPECT_NE(error_of("command = limits\n").find("'output'"), std::string::npos);
    const std::string steady = "command = steady\noutput = x\nchi_r = 0.9\nomega_dd = 15\ngamma_pn = 3\nn_bar = 0.05\n";
    EXPECT_NE(error_of(steady).find("'rabi'"), std::string::npos);
    EXPECT_EQ(error_of(steady + "rabi = 5\ndetuning = -15\n"), "");
}

TEST(ParseConfig, MalformedText)
{
    EXPECT_NE(error_of("command steady\n").find("line 1"), std::string::npos);
    EXPECT_NE(error_of(kSweepConfig + "chi_r = 0.8\n").find("duplicate key 'chi_r'"), std::string::npos);
    EXPECT_NE(error_of(kSweepConfig, {{"chi_r", "abc"}}).find("not a finite number"), std::string::npos);
    EXPECT_NE(error_of(kSweepConfig, {{"command", "plot"}}).find("not one of"), std::string::npos);
    EXPECT_NE(error_of(kSweepConfig, {{"format", "xml"}}).find("csv, json"), std::string::npos);
    EXPECT_NE(error_of(kSweepConfig, {{"omega_dd", "0"}}).find("omega_dd"), std::string::npos);
}

TEST(ParseConfig, EntriesRoundTripThroughText)
{
    const Entries e = parse_entries(kSweepConfig);
    EXPECT_EQ(parse_entries(to_text(e)), e);
}

TEST(ParseConfig, ShippedConfigsParse)
{
    for (const char* name : {"sweep.conf", "transient.conf", "steady.conf", "limits.conf", "convert.conf"}) {
        const std::string path = std::string(QDPAIR_CONFIG_DIR) + "/" + name;
        EXPECT_NO_THROW(parse_config(read_file(path))) << path;
    }
}

TEST(Output, NumberFormatting)
{
    EXPECT_EQ(format_number(0.1), "0.10000000000000001");
    EXPECT_EQ(format_number(-40.0), "-40");
    EXPECT_EQ(format_number(1e-300), "1e-300");
    EXPECT_EQ(format_number(1.0 / 3.0), "0.33333333333333331");
    EXPECT_EQ(std::stod(format_number(2.0 / 3.0)), 2.0 / 3.0);
}

TEST(Output, CsvAndJsonLayout)
{
    Table t{{"a", "b"}, {{1.0, 0.5}, {std::nan(""), 2.0}}};
    std::ostringstream os;
    t.write_csv(os);
    EXPECT_EQ(os.str(), "a,b\n1,0.5\nnan,2\n");
    const auto j = t.to_json();
    EXPECT_EQ(j.at("columns"), nlohmann::json({"a", "b"}));
    EXPECT_TRUE(j.at("rows")[1][0].is_null());
}

TEST(Run, SteadyWritesObservablesAndDensityMatrix)
{
    TempDir dir;
    const RunConfig cfg = parse_config(read_file(std::string(QDPAIR_CONFIG_DIR) + "/steady.conf"),
                                       {{"output", dir.file("steady.csv")}});
    std::ostringstream out, log;
    ASSERT_EQ(run(cfg, out, log), kOk);
    const auto lines = lines_of(read_file(dir.file("steady.csv")));
    ASSERT_EQ(lines.size(), 2u);
    EXPECT_EQ(lines[0].rfind("C,R_ee,R_ss,R_aa,R_gg,I_s,purity,residual,unique,re_ee,re_es,", 0), 0u);
    EXPECT_NE(lines[0].find(",im_gg"), std::string::npos);
    EXPECT_EQ(std::count(lines[0].begin(), lines[0].end(), ','), 40);
    EXPECT_EQ(std::count(lines[1].begin(), lines[1].end(), ','), 40);
}

TEST(Run, EvolveWritesTimeSeries)
{
    TempDir dir;
    const RunConfig cfg = parse_config(read_file(std::string(QDPAIR_CONFIG_DIR) + "/transient.conf"),
                                       {{"output", dir.file("t.csv")}, {"t_end", "2"}, {"t_count", "5"}});
    std::ostringstream out, log;
    ASSERT_EQ(run(cfg, out, log), kOk);
    const auto lines = lines_of(read_file(dir.file("t.csv")));
    ASSERT_EQ(lines.size(), 6u);
    EXPECT_EQ(lines[0], "t,R_ee,R_ss,R_aa,R_gg,C,I_s,purity");
    EXPECT_EQ(lines[1], "0,0,0,0,1,0,0,1");
    EXPECT_EQ(lines[5].rfind("2,", 0), 0u);
}

TEST(Run, SweepCsvAndMetadataRoundTrip)
{
    TempDir dir;
    const Entries overrides{{"output", dir.file("a.csv")},   {"detuning_min", "-20"}, {"detuning_max", "0"},
                            {"detuning_count", "9"},         {"rabi_min", "1"},       {"rabi_max", "6"},
                            {"rabi_count", "4"}};
    const RunConfig cfg = parse_config(kSweepConfig, overrides);
    std::ostringstream out, log;
    ASSERT_EQ(run(cfg, out, log, 3), kOk);

    const std::string csv = read_file(dir.file("a.csv"));
    const auto lines = lines_of(csv);
    ASSERT_EQ(lines.size(), 1u + 36u);
    EXPECT_EQ(lines[0], "delta,rabi,C,R_ee,R_ss,R_aa,R_gg,I_s");
    EXPECT_EQ(lines[1].rfind("-20,1,", 0), 0u);
    EXPECT_EQ(lines[2].rfind("-17.5,1,", 0), 0u);
    EXPECT_EQ(csv.find('\r'), std::string::npos);

    const auto meta = nlohmann::json::parse(read_file(sidecar_path(dir.file("a.csv"))));
    EXPECT_EQ(meta.at("command"), "sweep");
    EXPECT_EQ(meta.at("version"), kVersion);
    EXPECT_TRUE(meta.contains("timestamp"));
    EXPECT_EQ(meta.at("params").at("gamma_pn"), 3.0);
    EXPECT_EQ(meta.at("grid").at("rabi").at("count"), 4);
    EXPECT_TRUE(meta.at("failures").empty());

    const Entries replay = entries_from_metadata(meta.dump());
    const RunConfig again = parse_config(to_text(replay), {{"output", dir.file("b.csv")}});
    ASSERT_EQ(run(again, out, log, 1), kOk);
    EXPECT_EQ(read_file(dir.file("b.csv")), csv);
}

TEST(Run, SweepReportsCellFailures)
{
    TempDir dir;
    const RunConfig cfg = parse_config(kSweepConfig, {{"output", dir.file("f.csv")},
                                                      {"chi_r", "1"},
                                                      {"gamma_pn", "0"},
                                                      {"detuning_count", "2"},
                                                      {"rabi_count", "2"}});
    std::ostringstream out, log;
    EXPECT_EQ(run(cfg, out, log, 1), kCellFailures);
    const auto meta = nlohmann::json::parse(read_file(sidecar_path(dir.file("f.csv"))));
    EXPECT_EQ(meta.at("failures").size(), 4u);
    EXPECT_NE(lines_of(read_file(dir.file("f.csv")))[1].find("nan"), std::string::npos);
}

TEST(Run, LimitsCrossZeroAtClosedFormRoot)
{
    TempDir dir;
    const RunConfig cfg = parse_config(read_file(std::string(QDPAIR_CONFIG_DIR) + "/limits.conf"),
                                       {{"output", dir.file("l.csv")}, {"n_bar_count", "1001"}});
    std::ostringstream out, log;
    ASSERT_EQ(run(cfg, out, log), kOk);
    const auto lines = lines_of(read_file(dir.file("l.csv")));
    ASSERT_EQ(lines.size(), 1002u);
    EXPECT_EQ(lines[0], "n_bar,R_aa,R_ss,C");
    EXPECT_EQ(lines[1], "0,1,0,1");
    double last_positive = -1.0, first_zero = -1.0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::istringstream is(lines[i]);
        std::string n, raa, rss, c;
        std::getline(is, n, ',');
        std::getline(is, raa, ',');
        std::getline(is, rss, ',');
        std::getline(is, c, ',');
        if (std::stod(c) > 0.0)
            last_positive = std::stod(n);
        else if (first_zero < 0.0)
            first_zero = std::stod(n);
    }
    const double root = oracle::strong_phonon_concurrence_root();
    EXPECT_LT(last_positive, root);
    EXPECT_GE(first_zero, root);
    EXPECT_NEAR(first_zero, root, 1e-3);
}

TEST(Run, ConvertPrintsRatesAndConfigFragment)
{
    const RunConfig cfg = parse_config(read_file(std::string(QDPAIR_CONFIG_DIR) + "/convert.conf"));
    std::ostringstream out, log;
    ASSERT_EQ(run(cfg, out, log), kOk);
    const std::string text = out.str();
    EXPECT_NE(text.find("# gamma_pn = "), std::string::npos);
    // the uncommented lines are a valid config fragment
    const Entries e = parse_entries(text);
    EXPECT_EQ(e.at("gamma"), "1");
    EXPECT_NEAR(std::stod(e.at("omega_dd")), 750.0, 1e-9);
    const RunConfig as_steady =
        parse_config(text, {{"command", "steady"}, {"output", "x.csv"}, {"rabi", "1"}, {"detuning", "0"}});
    EXPECT_NEAR(as_steady.params.omega_dd, 750.0, 1e-9);
}

TEST(Run, ValidatePasses)
{
    const RunConfig cfg = parse_config("command = validate\n");
    std::ostringstream out, log;
    EXPECT_EQ(run(cfg, out, log), kOk) << out.str();
    EXPECT_NE(out.str().find("PASS"), std::string::npos);
    EXPECT_EQ(out.str().find("FAIL"), std::string::npos) << out.str();
}
