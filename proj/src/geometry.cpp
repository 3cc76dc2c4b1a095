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

#include "cfisac/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace cfisac
{
    namespace
    {
        double clamped_acos(double x)
        {
            return std::acos(std::clamp(x, -1.0, 1.0));
        }
    }

    PhysicalConstants PhysicalConstants::at(double carrier_hz)
    {
        if (!(carrier_hz > 0.0) || !std::isfinite(carrier_hz))
            throw ConfigError("carrier frequency must be positive and finite");
        PhysicalConstants k;
        k.fc = carrier_hz;
        return k;
    }

    Eigen::Vector3d AnglePair::direction() const
    {
        const double st = std::sin(elevation);
        return {st * std::cos(azimuth), st * std::sin(azimuth), std::cos(elevation)};
    }

    Eigen::Vector3d unit_vector(const Position3 &from, const Position3 &to)
    {
        const Eigen::Vector3d d = to.vec() - from.vec();
        const double n = d.norm();
        if (!(n > 0.0))
            throw DegenerateGeometry("coincident points");
        return d / n;
    }

    AnglePair angles_to(const Position3 &from, const Position3 &to)
    {
        const Eigen::Vector3d u = unit_vector(from, to);
        AnglePair a;
        a.elevation = clamped_acos(u.z());
        const double rho = std::hypot(u.x(), u.y());
        a.azimuth = rho > 0.0 ? std::atan2(u.y(), u.x()) : 0.0;
        if (a.azimuth >= pi) // atan2 can return +pi; keep [-pi, pi)
            a.azimuth -= 2.0 * pi;
        return a;
    }

    BistaticAngles bistatic_angles(const Position3 &target, const Velocity3 &v,
                                   const Position3 &tap, const Position3 &rap)
    {
        const Eigen::Vector3d u_tx = unit_vector(target, tap);
        const Eigen::Vector3d u_rx = unit_vector(target, rap);
        const Eigen::Vector3d sum = u_tx + u_rx;
        const double sn = sum.norm();
        if (sn < 1e-12)
            throw BisectorUndefined("target lies between tAP and rAP on their baseline");

        BistaticAngles out;
        out.psi = clamped_acos(u_tx.dot(u_rx));
        out.bisector = sum / sn;
        const double speed = v.norm();
        out.chi = speed > 0.0 ? clamped_acos(v.vec().dot(out.bisector) / speed) : 0.0;
        return out;
    }

    Eigen::Vector3d doppler_gradient(const Position3 &target, const Position3 &tap,
                                     const Position3 &rap, const PhysicalConstants &consts)
    {
        return (consts.fc / consts.c) * (unit_vector(target, tap) + unit_vector(target, rap));
    }

    double bistatic_doppler(const Position3 &target, const Velocity3 &v,
                            const Position3 &tap, const Position3 &rap,
                            const PhysicalConstants &consts)
    {
        // Propagates BisectorUndefined for the antipodal case even though the
        // vector form itself is finite there (it is exactly zero).
        bistatic_angles(target, v, tap, rap);
        return doppler_gradient(target, tap, rap, consts).dot(v.vec());
    }

    double bistatic_doppler_closed_form(const Position3 &target, const Velocity3 &v,
                                        const Position3 &tap, const Position3 &rap,
                                        const PhysicalConstants &consts)
    {
        const BistaticAngles b = bistatic_angles(target, v, tap, rap);
        return 2.0 * v.norm() * consts.fc / consts.c * std::cos(b.psi / 2.0) * std::cos(b.chi);
    }

    double bistatic_delay(const Position3 &target, const Position3 &tap, const Position3 &rap,
                          const PhysicalConstants &consts)
    {
        return ((tap.vec() - target.vec()).norm() + (target.vec() - rap.vec()).norm()) / consts.c;
    }

    CVector steering_vector(const AnglePair &angles, int n_antennas, const ArraySpec &array)
    {
        if (n_antennas < 1)
            throw ConfigError("steering_vector: n_antennas must be >= 1");
        const double cosine = array.axis.normalized().dot(angles.direction());
        const double step = 2.0 * pi * array.spacing_wavelengths * cosine;
        CVector a(n_antennas);
        for (int k = 0; k < n_antennas; ++k)
            a(k) = std::polar(1.0, step * k);
        return a;
    }
}
