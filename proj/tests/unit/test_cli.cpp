#include <sphsp/error.hpp>
#include <sphsp/image_io.hpp>
#include <sphsp_tools/commands.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sphsp;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("sphsp_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    int run(const std::string& args) const {
        const std::string cmd = std::string(SPHSP_CLI_PATH) + " " + args + " > " + (dir_ / "stdout.txt").string() +
                                " 2> " + (dir_ / "stderr.txt").string();
        const int status = std::system(cmd.c_str());
        return WEXITSTATUS(status);
    }
    std::string read(const std::string& name) const {
        std::ifstream in(dir_ / name);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SynthSegmentEvalPipeline) {
    ASSERT_EQ(run("synth --output-dir " + path("d") + " --count 2 --shape 32x64"), 0);
    ASSERT_TRUE(fs::exists(dir_ / "d" / "synth_0001_gt.png"));
    ASSERT_EQ(run("segment -i " + path("d/synth_0000.png") + " -o " + path("l.png") + " -k 20 --csv " +
                  path("l.csv") + " --overlay " + path("o.png")),
              0);
    const Segmentation labels = read_label_image(dir_ / "l.png");
    EXPECT_EQ(labels.height(), 32);
    EXPECT_TRUE(fs::exists(dir_ / "l.json"));
    EXPECT_NE(read("l.json").find("\"superpixels\": 20"), std::string::npos);
    ASSERT_EQ(run("eval --labels " + path("l.png") + " --gt " + path("d/synth_0000_gt.png") + " -o " +
                  path("e.json")),
              0);
    EXPECT_NE(read("e.json").find("\"asa\""), std::string::npos);
}

TEST_F(CliTest, BatchEvalAggregates) {
    ASSERT_EQ(run("synth --output-dir " + path("gt") + " --count 2 --shape 16x32"), 0);
    fs::create_directories(dir_ / "labels");
    fs::create_directories(dir_ / "g");
    for (const char* n : {"synth_0000_gt.png", "synth_0001_gt.png"}) {
        fs::copy_file(dir_ / "gt" / n, dir_ / "labels" / n);
        fs::copy_file(dir_ / "gt" / n, dir_ / "g" / n);
    }
    ASSERT_EQ(run("eval --labels-dir " + path("labels") + " --gt-dir " + path("g") + " -o " + path("b.json")), 0);
    const std::string j = read("b.json");
    EXPECT_NE(j.find("\"aggregate\""), std::string::npos);
    EXPECT_NE(j.find("\"count\": 2"), std::string::npos);
}

TEST_F(CliTest, AugmentReplaysFromSpec) {
    ASSERT_EQ(run("synth --output-dir " + path("d") + " --shape 32x64"), 0);
    const std::string in = " -i " + path("d/synth_0000.png") + " --labels " + path("d/synth_0000_gt.png");
    ASSERT_EQ(run("augment" + in + " -o " + path("a.png") + " --output-labels " + path("a_gt.png") +
                  " --seed 3 --spec-out " + path("spec.json")),
              0);
    ASSERT_EQ(run("augment" + in + " -o " + path("b.png") + " --output-labels " + path("b_gt.png") + " --spec " +
                  path("spec.json") + " --spec-out " + path("spec2.json")),
              0);
    EXPECT_EQ(read("a.png"), read("b.png"));
    EXPECT_EQ(read("a_gt.png"), read("b_gt.png"));
    EXPECT_EQ(read("spec.json"), read("spec2.json"));
}

TEST_F(CliTest, ExitCodes) {
    EXPECT_EQ(run("segment -i " + path("missing.png") + " -o " + path("x.png")), 1);
    EXPECT_EQ(run("segment"), 1);
    EXPECT_EQ(run("nonsense"), 1);
    EXPECT_EQ(run("gradcheck --corrupt -o " + path("g.json")), 3);
    EXPECT_NE(read("g.json").find("\"pass\": false"), std::string::npos);
    EXPECT_EQ(run("gradcheck -o " + path("g2.json")), 0);
    EXPECT_EQ(run("train-toy --output-dir " + path("t") + " --steps 20 --train-count 2 --heldout-count 1 --lr 1e200"),
              2);
    EXPECT_EQ(run("synth --output-dir " + path("s") + " --shape 8by16"), 1);
}

TEST_F(CliTest, TrainToyWritesArtifacts) {
    ASSERT_EQ(run("train-toy --output-dir " + path("t") +
                  " --steps 3 --train-count 2 --heldout-count 1 --shape 16x32 -k 8"),
              0);
    EXPECT_TRUE(fs::exists(dir_ / "t" / "weights.json"));
    const std::string csv = read("t/loss.csv");
    EXPECT_EQ(csv.rfind("step,l_seg,l_compact,total\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
    EXPECT_NE(read("t/report.json").find("heldout_asa_trained"), std::string::npos);
    ASSERT_EQ(run("synth --output-dir " + path("d") + " --shape 16x32"), 0);
    EXPECT_EQ(run("segment -i " + path("d/synth_0000.png") + " -o " + path("n.png") + " -k 8 --net " +
                  path("t/weights.json")),
              0);
}

TEST_F(CliTest, BenchWritesCsv) {
    ASSERT_EQ(run("synth --output-dir " + path("d") + " --count 2 --shape 32x64"), 0);
    ASSERT_EQ(run("bench --input-dir " + path("d") + " -o " + path("bench.csv") + " --k-values 10 20 40"), 0);
    const std::string csv = read("bench.csv");
    EXPECT_EQ(csv.rfind("image,K,ASA,BR,CD\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
    EXPECT_NE(read("bench.json").find("cd_at_br_0.7"), std::string::npos);
}

TEST(CliConfig, ParseShape) {
    const GridShape s = tools::parse_shape("12x34");
    EXPECT_EQ(s.height(), 12);
    EXPECT_EQ(s.width(), 34);
    EXPECT_THROW(tools::parse_shape("12x"), InvalidInput);
    EXPECT_THROW(tools::parse_shape("x34"), InvalidInput);
    EXPECT_THROW(tools::parse_shape("12x34z"), InvalidInput);
}

TEST(CliConfig, SettingsValidation) {
    tools::SegmentSettings s;
    s.mode = "fuzzy";
    EXPECT_THROW(s.to_options(), InvalidInput);
    s.mode = "soft";
    const SegmentOptions o = s.to_options();
    EXPECT_TRUE(o.soft_mode);
    s.temperature = 0.0;
    EXPECT_THROW(s.to_options(), InvalidInput);
}
