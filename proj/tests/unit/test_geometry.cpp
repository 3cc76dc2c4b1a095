// SPDX-License-Identifier: Apache-2.0
//
// cfisac - Doppler-aware sensing simulator for cell-free ISAC networks
// Copyright (C) 2026 The cfisac authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Geometry: angles, bistatic angles, Doppler, delay, steering vectors.

#include "cfisac/geometry.hpp"
#include "support.hpp"

using namespace cfisac;
using namespace testing;
using Catch::Approx;

namespace
{
    // Total path length tAP -> target -> rAP with the target moved along v for time t.
    double path_length(const Position3 &target, const Velocity3 &v, double t, const Position3 &tap,
                       const Position3 &rap)
    {
        const Eigen::Vector3d p = target.vec() + t * v.vec();
        return (p - tap.vec()).norm() + (p - rap.vec()).norm();
    }
}

TEST_CASE("angles_to axis-aligned and hand-computed directions", "[geometry]")
{
    const AnglePair x = angles_to({0, 0, 0}, {1, 0, 0});
    CHECK(x.azimuth == Approx(0.0).margin(1e-15));
    CHECK(x.elevation == Approx(pi / 2));

    const AnglePair z = angles_to({0, 0, 0}, {0, 0, 5});
    CHECK(z.elevation == Approx(0.0).margin(1e-15));
    CHECK(z.azimuth == 0.0);

    const AnglePair d = angles_to({0, 0, 0}, {1, 1, std::sqrt(2.0)});
    CHECK(d.azimuth == Approx(pi / 4));
    CHECK(d.elevation == Approx(pi / 4));
}

TEST_CASE("angles_to reproduces the unit vector and stays in range", "[geometry]")
{
    Rng rng(11);
    for (int i = 0; i < 1000; ++i)
    {
        const Position3 a = random_position(rng), b = random_position(rng);
        const AnglePair ang = angles_to(a, b);
        CHECK(ang.azimuth >= -pi);
        CHECK(ang.azimuth < pi);
        CHECK(ang.elevation >= 0.0);
        CHECK(ang.elevation <= pi);
        CHECK((ang.direction() - unit_vector(a, b)).norm() < 1e-12);
    }
    CHECK_THROWS_AS(angles_to({1, 2, 3}, {1, 2, 3}), DegenerateGeometry);
}

TEST_CASE("bistatic_angles special geometries", "[geometry]")
{
    // Colocated tAP/rAP: monostatic.
    const Position3 target{10, 20, 50}, ap{100, 0, 10};
    const BistaticAngles mono = bistatic_angles(target, {1, 0, 0}, ap, ap);
    CHECK(mono.psi == Approx(0.0).margin(1e-7));
    CHECK((mono.bisector - unit_vector(target, ap)).norm() < 1e-12);

    // Symmetric geometry, velocity orthogonal to the bisector.
    const BistaticAngles sym = bistatic_angles({0, 0, 50}, {0, 100, 0}, {100, 0, 10}, {-100, 0, 10});
    CHECK((sym.bisector - Eigen::Vector3d(0, 0, -1)).norm() < 1e-12);
    CHECK(sym.chi == Approx(pi / 2));

    // Stationary target reports chi = 0.
    CHECK(bistatic_angles(target, {}, ap, {0, 0, 10}).chi == 0.0);

    // Target on the baseline between the APs.
    CHECK_THROWS_AS(bistatic_angles({0, 0, 10}, {1, 0, 0}, {100, 0, 10}, {-100, 0, 10}), BisectorUndefined);
    CHECK_THROWS_AS(bistatic_angles(ap, {1, 0, 0}, ap, {0, 0, 10}), DegenerateGeometry);
}

TEST_CASE("cos psi matches the spherical dot-product identity", "[geometry]")
{
    Rng rng(12);
    for (int i = 0; i < 1000; ++i)
    {
        const Position3 t = random_position(rng, 500, 20, 100), tx = random_position(rng, 500, 10, 10),
                        rx = random_position(rng, 500, 10, 10);
        const BistaticAngles b = bistatic_angles(t, random_velocity(rng), tx, rx);
        const AnglePair a1 = angles_to(t, tx), a2 = angles_to(t, rx);
        const double identity = std::sin(a1.elevation) * std::sin(a2.elevation) * std::cos(a1.azimuth - a2.azimuth) +
                                std::cos(a1.elevation) * std::cos(a2.elevation);
        CHECK(std::cos(b.psi) == Approx(identity).margin(1e-12));
        CHECK(b.psi >= 0.0);
        CHECK(b.psi <= pi);
        CHECK(b.chi >= 0.0);
        CHECK(b.chi <= pi);
        CHECK(b.bisector.norm() == Approx(1.0));
    }
}

TEST_CASE("bistatic Doppler: stationary, monostatic and finite-difference oracle", "[geometry]")
{
    const PhysicalConstants k = PhysicalConstants::at(3e9);
    const Position3 target{0, 0, 50}, ap{0, 0, 10};
    CHECK(bistatic_doppler(target, {}, {100, 0, 10}, {-50, 30, 10}, k) == 0.0);

    // Straight at the AP at 150 m/s.
    const double fd = bistatic_doppler(target, {0, 0, -150}, ap, ap, k);
    CHECK(fd == Approx(2.0 * 150.0 * 3e9 / 2.998e8).epsilon(1e-12));
    CHECK(fd == Approx(3002.0).margin(0.01));

    Rng rng(13);
    for (int i = 0; i < 2000; ++i)
    {
        const Position3 t = random_position(rng, 500, 20, 100), tx = random_position(rng, 500, 10, 10),
                        rx = random_position(rng, 500, 10, 10);
        const Velocity3 v = random_velocity(rng);
        const double f = bistatic_doppler(t, v, tx, rx, k);
        const double dt = 1e-6;
        const double fd_fd = -(path_length(t, v, dt, tx, rx) - path_length(t, v, -dt, tx, rx)) / (2 * dt) /
                             k.wavelength();
        CHECK(std::abs(f - fd_fd) <= 1e-6 * std::max(std::abs(f), 1.0));
        CHECK(std::abs(bistatic_doppler_closed_form(t, v, tx, rx, k) - f) <= 1e-12 * std::max(std::abs(f), 1.0) + 1e-9);
        CHECK((doppler_gradient(t, tx, rx, k).dot(v.vec()) - f) == Approx(0.0).margin(1e-9));
    }
}

TEST_CASE("Doppler vanishes orthogonal to the bisector and reduces to monostatic", "[geometry]")
{
    const PhysicalConstants k = PhysicalConstants::at(3e9);
    Rng rng(14);
    for (int i = 0; i < 500; ++i)
    {
        const Position3 t = random_position(rng, 500, 20, 100), tx = random_position(rng, 500, 10, 10),
                        rx = random_position(rng, 500, 10, 10);
        const Eigen::Vector3d b = bistatic_angles(t, {1, 0, 0}, tx, rx).bisector;
        Eigen::Vector3d w = random_velocity(rng).vec();
        w -= w.dot(b) * b;
        const Velocity3 v = Velocity3::from(w);
        CHECK(std::abs(bistatic_doppler(t, v, tx, rx, k)) <= 1e-12 * v.norm() * k.fc / k.c * 10);

        const Velocity3 u = random_velocity(rng);
        const double mono = 2.0 * k.fc / k.c * u.vec().dot(unit_vector(t, tx));
        CHECK(bistatic_doppler(t, u, tx, tx, k) == Approx(mono).margin(1e-9));
    }
}

TEST_CASE("bistatic delay", "[geometry]")
{
    const PhysicalConstants k = PhysicalConstants::at(3e9);
    CHECK(bistatic_delay({0, 0, 50}, {100, 0, 10}, {-100, 0, 10}, k) ==
          Approx(2.0 * std::sqrt(100.0 * 100.0 + 40.0 * 40.0) / 2.998e8));
    CHECK(bistatic_delay({0, 0, 50}, {0, 0, 10}, {0, 0, 10}, k) == Approx(80.0 / 2.998e8));

    Rng rng(15);
    for (int i = 0; i < 200; ++i)
    {
        const Position3 t = random_position(rng), a = random_position(rng), b = random_position(rng);
        const double d = (t.vec() - a.vec()).norm() + (t.vec() - b.vec()).norm();
        CHECK(bistatic_delay(t, a, b, k) * k.c == Approx(d).epsilon(1e-14));
    }
}

TEST_CASE("steering vectors", "[geometry]")
{
    const CVector zen = steering_vector({0.0, 0.0}, 4);
    for (int i = 0; i < 4; ++i)
        CHECK(std::abs(zen(i) - cplx(1, 0)) < 1e-15);

    const CVector end = steering_vector({0.0, pi / 2}, 4);
    const double expect[4] = {1, -1, 1, -1};
    for (int i = 0; i < 4; ++i)
        CHECK(std::abs(end(i) - cplx(expect[i], 0)) < 1e-12);

    Rng rng(16);
    for (int i = 0; i < 200; ++i)
    {
        const AnglePair a{uniform(rng, -pi, pi), uniform(rng, 0, pi)};
        const CVector s = steering_vector(a, 8);
        CHECK(std::abs(s(0) - cplx(1, 0)) < 1e-15);
        for (int j = 0; j < 8; ++j)
        {
            CHECK(std::abs(s(j)) == Approx(1.0).epsilon(1e-14));
            const cplx ref = std::polar(1.0, pi * j * std::sin(a.elevation) * std::cos(a.azimuth));
            CHECK(std::abs(s(j) - ref) < 1e-12);
        }
        CHECK(s.squaredNorm() == Approx(8.0));
    }
    CHECK_THROWS_AS(PhysicalConstants::at(0.0), ConfigError);
}
