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

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cfisac
{
    using cplx = std::complex<double>;
    using CVector = Eigen::VectorXcd;
    using CMatrix = Eigen::MatrixXcd;
    using RVector = Eigen::VectorXd;
    using RMatrix = Eigen::MatrixXd;

    inline constexpr double pi = std::numbers::pi;
    inline constexpr double speed_of_light = 2.998e8;

    // ---- Error types --------------------------------------------------------

    /// Invalid configuration or argument outside an operation's contract.
    class ConfigError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    /// Coincident points or otherwise undefined geometry.
    class DegenerateGeometry : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// Target lies on the tAP-rAP baseline, the two unit vectors are antipodal.
    class BisectorUndefined : public DegenerateGeometry
    {
    public:
        using DegenerateGeometry::DegenerateGeometry;
    };

    /// Response matrix has no usable column space.
    class RankDeficient : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // ---- Strong 3-vectors ---------------------------------------------------

    template <class Tag>
    struct Triple
    {
        double x = 0.0;
        double y = 0.0;
        double z = 0.0;

        Eigen::Vector3d vec() const { return {x, y, z}; }
        static Triple from(const Eigen::Vector3d &v) { return {v.x(), v.y(), v.z()}; }
        double norm() const { return vec().norm(); }
        bool operator==(const Triple &) const = default;
    };

    struct PositionTag;
    struct VelocityTag;

    /// Cartesian position in meters.
    using Position3 = Triple<PositionTag>;

    /// Velocity in meters per second.
    using Velocity3 = Triple<VelocityTag>;
}
