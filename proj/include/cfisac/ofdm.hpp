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
    /// Subcarrier-domain OFDM frame layout. All processing happens per (n, n') resource
    /// element; no time-domain synthesis.
    struct OFDMGrid
    {
        int nc = 12;               // subcarriers
        int ns = 14;               // OFDM symbols per block
        double delta_f = 30.0e3;   // Hz
        double fc = 3.0e9;         // Hz
        double cp_ratio = 1.0 / 14.0;
        double bandwidth_budget = 20.0e6;

        double useful_duration() const { return 1.0 / delta_f; }   // T
        double cp_duration() const { return cp_ratio / delta_f; }  // T_CP
        double symbol_duration() const { return useful_duration() + cp_duration(); } // T_s
        double bandwidth() const { return nc * delta_f; }          // B
        int resource_elements() const { return nc * ns; }

        /// Worst-case Doppler 2 nu_max fc / c.
        double max_doppler(double nu_max, double c = speed_of_light) const { return 2.0 * nu_max * fc / c; }

        /// Rejects empty grids, B above the budget and f_d,max > delta_f.
        void validate(double nu_max, double c = speed_of_light) const;
    };
}
