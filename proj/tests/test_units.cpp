#include "doctest.h"
#include "pmol/units.hpp"

using namespace pmol;
using namespace pmol::units;

TEST_CASE("quantity parsing") {
  CHECK(parse_quantity("40 MHz").value == doctest::Approx(4e7));
  CHECK(parse_quantity("40 MHz").dim == Dim::Frequency);
  CHECK(parse_quantity("1550 nm").value == doctest::Approx(1.55e-6));
  CHECK(parse_quantity("31.5 um").dim == Dim::Length);
  CHECK(parse_quantity("19 uW").value == doctest::Approx(1.9e-5));
  CHECK(parse_quantity("5e-11 kg").value == doctest::Approx(5e-11));
  CHECK(parse_quantity("300 K").dim == Dim::Temperature);
  CHECK(parse_quantity("0.5").dim == Dim::Dimensionless);
  CHECK(parse_quantity("2e7").value == doctest::Approx(2e7));
  CHECK(parse_quantity(" 12 ns ").value == doctest::Approx(1.2e-8));

  CHECK_THROWS_AS(parse_quantity("40 parsec"), validation_error);
  CHECK_THROWS_AS(parse_quantity("fast"), validation_error);
  CHECK_THROWS_AS(parse_quantity(""), validation_error);
}

TEST_CASE("format round-trips bit exactly") {
  for (double v : {1.904187691755358e-05, 6.477660023514504e-17, 2.5132741228718345e8}) {
    for (Dim d : {Dim::Power, Dim::Length, Dim::Frequency, Dim::Time}) {
      const Quantity q = parse_quantity(format_quantity(v, d));
      CHECK(q.value == v);
      CHECK(q.dim == d);
    }
  }
}
