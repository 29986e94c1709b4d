#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "heavylasso/io.hpp"

using namespace heavylasso;

namespace {

io::FormatError csv_error(const std::string& text) {
  std::istringstream in(text);
  try {
    io::read_csv(in, "data.csv");
  } catch (const io::FormatError& e) {
    return e;
  }
  FAIL("expected a format error");
  return io::FormatError("", 0, 0, "");
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("csv parsing") {
    std::istringstream in("\xEF\xBB\xBFx1,y,x2\n1,2,3\n\n-4.5,5e-1, 6 \n");
    const io::CsvTable t = io::read_csv(in);
    CHECK(t.header == std::vector<std::string>{"x1", "y", "x2"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[1] == std::vector<double>{-4.5, 0.5, 6.0});

    const io::LabeledDataset ld = io::dataset_from_table(t, "y");
    CHECK(ld.feature_names == std::vector<std::string>{"x1", "x2"});
    CHECK(ld.data.n() == 2);
    CHECK(ld.data.x()(1, 1) == 6.0);
    CHECK(ld.data.y()[0] == 2.0);
    CHECK_THROWS_AS(io::dataset_from_table(t, "z"), io::FormatError);
  }

  TEST_CASE("csv errors carry row and column") {
    auto e = csv_error("a,b\n1,2\n3,oops\n");
    CHECK(e.row() == 3);
    CHECK(e.column() == 2);
    CHECK(std::string(e.what()).find("data.csv:3:2") != std::string::npos);

    e = csv_error("a,b\n1,2,3\n");
    CHECK(e.row() == 2);
    CHECK(e.column() == 0);

    e = csv_error("a,a\n1,2\n");
    CHECK(e.row() == 1);
    CHECK(e.column() == 2);

    CHECK(csv_error("a,b\n1,nan\n").column() == 2);
    CHECK(csv_error("a,b\n1,inf\n").column() == 2);
    CHECK(csv_error("a,,b\n1,2,3\n").column() == 2);
    CHECK(csv_error("").row() == 0);
    CHECK(csv_error("a,b\n").row() == 0);
    CHECK_THROWS_AS(io::read_csv_file("/nonexistent/file.csv"), InvalidInput);
  }

  TEST_CASE("format_double round trips") {
    for (double v : {0.0, -0.0, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5,
                     std::numeric_limits<double>::denorm_min(), std::numeric_limits<double>::max()}) {
      const std::string s = io::format_double(v);
      CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    CHECK(io::format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(io::format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(io::format_double(std::nan("")) == "nan");
  }

  TEST_CASE("coefficient and weight files") {
    std::ostringstream out;
    io::write_coefficients_csv(out, {"a", "b"}, Coefficients({0.5, 0.0}, 2.0), true);
    CHECK(out.str() == "feature,estimate\n(intercept),2\na,0.5\nb,0\n");
    std::ostringstream w;
    io::write_weights_csv(w, {1.0, 0.25});
    CHECK(w.str() == "observation,weight\n1,1\n2,0.25\n");
    CHECK_THROWS_AS(io::write_coefficients_csv(out, {"a"}, Coefficients({1.0, 2.0}), false),
                    ContractViolation);
  }

  TEST_CASE("scenario file parsing") {
    std::istringstream in(
        "# table\n"
        "n = 60\n"
        "p = 80   # wide\n"
        "s=5\n"
        "noise = gauss, cauchy\n"
        "methods = student,huber\n"
        "nu = 5\n"
        "scale = rss\n"
        "grid_size = 30\n"
        "reps = 3\n");
    const io::SimulationConfig cfg = io::parse_simulation_config(in, "t.cfg");
    CHECK(cfg.spec.n == 60);
    CHECK(cfg.spec.p == 80);
    CHECK(cfg.spec.s == 5);
    CHECK(cfg.spec.reps == 3);
    CHECK(cfg.noises == std::vector<NoiseKind>{NoiseKind::gauss, NoiseKind::cauchy});
    REQUIRE(cfg.methods.size() == 2);
    CHECK(cfg.methods[0].cfg.nu == 5.0);
    CHECK(cfg.methods[0].scale == ResidualScale::rss);
    CHECK(cfg.methods[1].cfg.loss_kind == LossKind::huber);
    CHECK(cfg.methods[1].grid_size == 30);
    const auto j = io::to_json(cfg);
    CHECK(j.at("n") == 60);
    CHECK(j.at("methods").at(0).at("residual_scale") == "rss");
  }

  TEST_CASE("scenario file errors") {
    const auto message = [](const std::string& text) {
      std::istringstream in(text);
      try {
        io::parse_simulation_config(in, "t.cfg");
      } catch (const InvalidConfig& e) {
        return std::string(e.what());
      }
      return std::string();
    };
    CHECK(message("n = 10\nbogus = 1\n").find("t.cfg:2") != std::string::npos);
    CHECK(message("n = 10\nbogus = 1\n").find("unknown setting 'bogus'") != std::string::npos);
    CHECK(message("n = ten\n").find("t.cfg:1") != std::string::npos);
    CHECK(message("noise = laplace\n").find("t.cfg:1") != std::string::npos);
    CHECK(message("just text\n").find("t.cfg:1") != std::string::npos);
    CHECK_FALSE(message("s = 500\n").empty());
    CHECK_FALSE(message("nu = -1\n").empty());
    CHECK(message("n = 50\n").empty());
  }
}
