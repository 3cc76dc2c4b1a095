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

#pragma once

#include "cfisac/types.hpp"

namespace cfisac
{
    struct PhysicalConstants
    {
        double c = speed_of_light; // m/s
        double fc = 3.0e9;         // Hz

        /// Throws ConfigError for fc <= 0.
        static PhysicalConstants at(double carrier_hz);

        double wavelength() const { return c / fc; }
    };

    /// Azimuth in [-pi, pi), elevation from +z in [0, pi].
    struct AnglePair
    {
        double azimuth = 0.0;
        double elevation = 0.0;

        Eigen::Vector3d direction() const;
    };

    struct BistaticAngles
    {
        double psi = 0.0; // full bistatic angle
        double chi = 0.0; // velocity vs. bisector
        Eigen::Vector3d bisector = Eigen::Vector3d::UnitZ();
    };

    /// Uniform linear array; spacing in wavelengths along a unit axis.
    struct ArraySpec
    {
        Eigen::Vector3d axis = Eigen::Vector3d::UnitX();
        double spacing_wavelengths = 0.5;
    };

    /// Unit vector from `from` toward `to`. Throws DegenerateGeometry on coincidence.
    Eigen::Vector3d unit_vector(const Position3 &from, const Position3 &to);

    AnglePair angles_to(const Position3 &from, const Position3 &to);

    /// psi = arccos(u_tx . u_rx), bisector = normalized (u_tx + u_rx), chi = arccos(v . b / |v|).
    /// u_tx, u_rx point from the target toward the tAP and rAP. chi is 0 for a stationary target.
    BistaticAngles bistatic_angles(const Position3 &target, const Velocity3 &v,
                                   const Position3 &tap, const Position3 &rap);

    /// Doppler sensitivity vector g with f_d = g . v, i.e. g = (fc/c)(u_tx + u_rx).
    Eigen::Vector3d doppler_gradient(const Position3 &target, const Position3 &tap,
                                     const Position3 &rap, const PhysicalConstants &consts);

    /// Bistatic Doppler in Hz, positive for a closing target.
    double bistatic_doppler(const Position3 &target, const Velocity3 &v,
                            const Position3 &tap, const Position3 &rap,
                            const PhysicalConstants &consts);

    /// Closed-form magnitude 2 nu fc/c cos(psi/2) cos(chi) of the same shift.
    double bistatic_doppler_closed_form(const Position3 &target, const Velocity3 &v,
                                        const Position3 &tap, const Position3 &rap,
                                        const PhysicalConstants &consts);

    /// tAP -> target -> rAP propagation delay in seconds.
    double bistatic_delay(const Position3 &target, const Position3 &tap, const Position3 &rap,
                          const PhysicalConstants &consts);

    /// Array response toward `angles`; entry k = exp(j 2 pi d k (axis . u)).
    CVector steering_vector(const AnglePair &angles, int n_antennas, const ArraySpec &array = {});
}
