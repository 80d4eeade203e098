#include "doctest.h"
#include "mccqr/dataset.hpp"
#include "mccqr/common.hpp"

using namespace mccqr;

TEST_CASE("dataset parses a rectangular csv with ids") {
  const std::string text = "id,x0,x1,y\na,1.5,2,3\nb,-0.25,4,5\n";
  const Dataset ds = Dataset::read_text(text);
  CHECK(ds.rows == 2);
  CHECK(ds.has_ids);
  CHECK(ds.ids == std::vector<std::string>{"a", "b"});
  CHECK(ds.columns == std::vector<std::string>{"x0", "x1", "y"});
  CHECK(ds.column("y") == Vector{3.0, 5.0});
  CHECK(ds.column("x0") == Vector{1.5, -0.25});

  const Matrix features = ds.features({"y"});
  CHECK(features.cols() == 2);
  CHECK(features(1, 0) == -0.25);
  CHECK(ds.feature_names({"y"}) == std::vector<std::string>{"x0", "x1"});
}

TEST_CASE("dataset without id column numbers rows") {
  const Dataset ds = Dataset::read_text("x,y\n1,2\n3,4\n5,6\n");
  CHECK(!ds.has_ids);
  CHECK(ds.ids == std::vector<std::string>{"0", "1", "2"});
}

TEST_CASE("dataset diagnostics carry line and column") {
  CHECK_THROWS_WITH_AS(Dataset::read_text("x,y\n1,\n", "f.csv"),
                       doctest::Contains("line 2, column 'y': missing value"), DataError);
  CHECK_THROWS_WITH_AS(Dataset::read_text("x,y\n1,2\n3,abc\n", "f.csv"),
                       doctest::Contains("line 3, column 'y'"), DataError);
  CHECK_THROWS_WITH_AS(Dataset::read_text("x,y\n1,2,3\n", "f.csv"),
                       doctest::Contains("line 2 has 3 fields, expected 2"), DataError);
  CHECK_THROWS_WITH_AS(Dataset::read_text("x,x\n1,2\n", "f.csv"),
                       doctest::Contains("duplicate column"), DataError);
  CHECK_THROWS_AS(Dataset::read_text("", "f.csv"), DataError);
  CHECK_THROWS_AS(Dataset::read_text("x,y\n", "f.csv"), DataError);
  CHECK_THROWS_AS(Dataset::read_file("/nonexistent/path.csv"), IoError);
}

TEST_CASE("dataset handles crlf and blank trailing lines") {
  const Dataset ds = Dataset::read_text("x,y\r\n1,2\r\n\r\n3,4\r\n");
  CHECK(ds.rows == 2);
  CHECK(ds.column("x") == Vector{1.0, 3.0});
}

TEST_CASE("missing column lookup") {
  const Dataset ds = Dataset::read_text("x,y\n1,2\n");
  CHECK(ds.has_column("x"));
  CHECK(!ds.has_column("z"));
  CHECK_THROWS_WITH_AS(ds.column("z"), doctest::Contains("no column named 'z'"), DataError);
  CHECK_THROWS_AS(ds.features({"x", "y"}), DataError);
}
