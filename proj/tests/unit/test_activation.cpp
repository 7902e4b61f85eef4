#include <cmath>
#include <stdexcept>

#include "apstab/activation.hpp"
#include "doctest.h"

using namespace apstab;

TEST_CASE("activation evaluation per kind") {
    const ActivationSpec th = ActivationSpec::tanh_unit();
    CHECK(th.eval(0.0) == 0.0);
    CHECK(th.eval(1.0) == doctest::Approx(std::tanh(1.0)).epsilon(1e-15));

    const ActivationSpec sat = ActivationSpec::saturating();
    CHECK(sat.eval(-2.0) == -1.0);
    CHECK(sat.eval(0.3) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(sat.eval(2.0) == 1.0);

    const ActivationSpec lin = ActivationSpec::linear(-0.5, 0.5);
    CHECK(lin.eval(4.0) == doctest::Approx(-2.0).epsilon(1e-15));

    ActivationSpec table;
    table.kind = ActivationKind::CustomTable;
    table.table_x = {-1.0, 0.0, 1.0};
    table.table_y = {0.0, 0.5, 0.6};
    table.lipschitz_bound = 0.5;
    CHECK(table.eval(-0.5) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(table.eval(0.5) == doctest::Approx(0.55).epsilon(1e-15));
    // Constant extension outside the sampled range.
    CHECK(table.eval(-3.0) == 0.0);
    CHECK(table.eval(3.0) == 0.6);
    CHECK(table.eval(-1.0) == 0.0);
    CHECK(table.eval(1.0) == 0.6);
}

TEST_CASE("kind names used by the serializer") {
    CHECK(to_string(ActivationKind::HyperbolicTangent) == "tanh");
    CHECK(to_string(ActivationKind::PiecewiseLinearSaturating) == "piecewise_linear");
    CHECK(to_string(ActivationKind::Linear) == "linear");
    CHECK(to_string(ActivationKind::CustomTable) == "table");
}

TEST_CASE("tanh honors a unit Lipschitz bound but not a smaller one") {
    ActivationSpec spec = ActivationSpec::tanh_unit();
    CHECK(validate_activation(spec).passed());

    spec.lipschitz_bound = 0.5;
    const ActivationReport report = validate_activation(spec);
    CHECK(!report.lipschitz_ok);
    CHECK(report.monotone_ok);
    // The steepest quotient sits at the origin where tanh' = 1.
    CHECK(report.worst_quotient == doctest::Approx(1.0).epsilon(0.01));
    CHECK(std::abs(report.worst_pair_x0) < 0.02);
    CHECK(!report.passed());
}

TEST_CASE("linear activation validation separates slope and monotonicity") {
    // Slope 2 declared with bound 1: Lipschitz audit fails, monotone holds.
    const ActivationReport steep = validate_activation(ActivationSpec::linear(2.0, 1.0, true));
    CHECK(!steep.lipschitz_ok);
    CHECK(steep.monotone_ok);
    CHECK(steep.worst_quotient == doctest::Approx(2.0).epsilon(1e-9));

    // Decreasing map with an honest bound: Lipschitz holds, monotone fails.
    const ActivationReport dec = validate_activation(ActivationSpec::linear(-1.0, 1.0, true));
    CHECK(dec.lipschitz_ok);
    CHECK(!dec.monotone_ok);

    // Same map without the monotonicity requirement passes outright.
    CHECK(validate_activation(ActivationSpec::linear(-1.0, 1.0, false)).passed());
}

TEST_CASE("saturating activation passes with unit bound") {
    const ActivationReport report = validate_activation(ActivationSpec::saturating(true));
    CHECK(report.passed());
    CHECK(report.worst_quotient == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("table validation hits exact segment slopes via breakpoint insertion") {
    ActivationSpec table;
    table.kind = ActivationKind::CustomTable;
    table.table_x = {-1.0, 0.0, 1.0};
    table.table_y = {0.0, 0.5, 0.6};
    table.requires_monotone = true;

    table.lipschitz_bound = 0.5;
    CHECK(validate_activation(table).passed());

    table.lipschitz_bound = 0.4;
    const ActivationReport report = validate_activation(table);
    CHECK(!report.lipschitz_ok);
    CHECK(report.worst_quotient == doctest::Approx(0.5).epsilon(1e-12));

    // A non-monotone table trips the monotone audit.
    ActivationSpec dippy = table;
    dippy.lipschitz_bound = 2.0;
    dippy.table_y = {0.0, 0.5, 0.1};
    const ActivationReport dip = validate_activation(dippy);
    CHECK(dip.lipschitz_ok);
    CHECK(!dip.monotone_ok);
}

TEST_CASE("validation rejects degenerate setups") {
    const ActivationSpec spec = ActivationSpec::tanh_unit();
    ActivationGrid one_point;
    one_point.points = 1;
    CHECK_THROWS_AS(validate_activation(spec, one_point), std::invalid_argument);

    ActivationGrid no_width;
    no_width.half_width = 0.0;
    CHECK_THROWS_AS(validate_activation(spec, no_width), std::invalid_argument);

    ActivationSpec no_bound = ActivationSpec::tanh_unit();
    no_bound.lipschitz_bound = 0.0;
    CHECK_THROWS_AS(validate_activation(no_bound), std::invalid_argument);

    ActivationSpec bad_table;
    bad_table.kind = ActivationKind::CustomTable;
    bad_table.table_x = {0.0, 0.0};
    bad_table.table_y = {1.0, 2.0};
    CHECK_THROWS_AS(validate_activation(bad_table), std::invalid_argument);
    bad_table.table_x = {0.0};
    bad_table.table_y = {1.0};
    CHECK_THROWS_AS(validate_activation(bad_table), std::invalid_argument);
    bad_table.table_x = {0.0, 1.0};
    bad_table.table_y = {1.0};
    CHECK_THROWS_AS(validate_activation(bad_table), std::invalid_argument);
}
