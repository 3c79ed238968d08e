#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "qpot/config.hpp"
#include "qpot/io.hpp"

using namespace qpot;
using config::ConfigError;
using config::KeyValues;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "qpot_test_config";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(KeyValues, parses_comments_and_types)
{
  const auto kv = KeyValues::parse("# header\nscenario = box   # trailing\n\nL = 1e-5\nsteps=100\nflag = yes\norders = 0, 2,4\n");
  EXPECT_EQ(kv.require("scenario"), "box");
  EXPECT_DOUBLE_EQ(kv.get_double("L", 0.0), 1e-5);
  EXPECT_EQ(kv.get_int("steps", 0), 100);
  EXPECT_TRUE(kv.get_bool("flag", false));
  EXPECT_EQ(kv.get_int_list("orders", {}), (std::vector<long long>{0, 2, 4}));
  EXPECT_EQ(kv.get_double("missing", 2.5), 2.5);
  EXPECT_TRUE(kv.unused_keys().empty());
}

TEST(KeyValues, errors_report_line_numbers)
{
  EXPECT_EQ(message_of([] { KeyValues::parse("a = 1\nnot a pair\n"); }), "line 2: expected 'key = value'");
  EXPECT_EQ(message_of([] { KeyValues::parse("a = 1\n\na = 2\n"); }), "line 3: duplicate key 'a'");
  EXPECT_EQ(message_of([] { KeyValues::parse(" = 4\n"); }), "line 1: empty key");
  const auto kv = KeyValues::parse("x = 1\ny = abc\nz = 1.5\n");
  EXPECT_EQ(message_of([&] { kv.get_double("y", 0.0); }), "line 2: expected a number for 'y', got 'abc'");
  EXPECT_EQ(message_of([&] { kv.get_int("z", 0); }), "line 3: expected an integer for 'z', got '1.5'");
  EXPECT_THROW(kv.require("w"), ConfigError);
  EXPECT_THROW(KeyValues::load(scratch("does_not_exist.cfg").string()), ConfigError);
}

TEST(KeyValues, unknown_keys_are_rejected)
{
  const auto kv = KeyValues::parse("a = 1\ntypo = 2\n");
  kv.get_int("a", 0);
  EXPECT_EQ(kv.unused_keys(), std::vector<std::string>{"typo"});
  EXPECT_EQ(message_of([&] { kv.reject_unknown(); }), "line 2: unknown key 'typo'");
}

TEST(Io, format_double_round_trips)
{
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.62607015e-34, std::numbers::pi}) {
    const auto s = io::format_double(x);
    EXPECT_EQ(std::stod(s), x) << s;
  }
  EXPECT_EQ(io::format_double(0.1), "0.10000000000000001");
}

TEST(Io, content_hash_is_stable)
{
  EXPECT_EQ(io::content_hash(""), "cbf29ce484222325");
  EXPECT_EQ(io::content_hash("a"), "af63dc4c8601ec8c");
  EXPECT_NE(io::content_hash("seed = 1"), io::content_hash("seed = 2"));
}

TEST(Io, csv_table_checks_shape)
{
  io::CsvTable t({"n", "value"});
  t.row({"0", io::format_double(0.5)});
  EXPECT_EQ(t.text(), "n,value\n0,0.5\n");
  EXPECT_THROW(t.row({"1"}), io::IoError);
  EXPECT_THROW(t.row({"1", "a,b"}), io::IoError);
}

TEST(Io, grid_function_round_trip)
{
  for (const auto& g : {grid::Grid::dirichlet(0.0, 1.0, 33, grid::Backend::spectral),
                        grid::Grid::periodic(-2.0, 4.0, 64), grid::Grid::radial_log(1e-4, 50.0, 40)}) {
    const auto f = grid::GridFunction::sample(g, [](double x) { return std::sin(3.0 * x) / 7.0; });
    const auto path = scratch("f.csv");
    io::write_grid_function(path, f, "R", "angstrom^-1/2");
    const auto back = io::read_grid_function(path);
    EXPECT_EQ(back.quantity, "R");
    EXPECT_EQ(back.units, "angstrom^-1/2");
    EXPECT_EQ(back.function.grid->kind(), g->kind());
    EXPECT_EQ(back.function.grid->boundary(), g->boundary());
    EXPECT_EQ(back.function.grid->backend(), g->backend());
    EXPECT_EQ(back.function.values, f.values);
  }
}

TEST(Io, grid_function_rejects_mismatch)
{
  const auto g = grid::Grid::dirichlet(0.0, 1.0, 17);
  const auto path = scratch("bad.csv");
  io::write_grid_function(path, grid::GridFunction::zeros(g), "R", "");
  auto text = io::read_text(path);
  text.replace(text.find("\n0.0625,"), 8, "\n0.07,");
  io::write_text(path, text);
  EXPECT_THROW(io::read_grid_function(path), io::IoError);
  io::write_text(path, "x,R\n0,0\n");
  EXPECT_THROW(io::read_grid_function(path), io::IoError);
}
