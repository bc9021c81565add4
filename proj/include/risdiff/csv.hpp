// SPDX-License-Identifier: Apache-2.0
//
// risdiff: link-level simulator for RIS-aided differential SIMO-OFDM beam training
// Copyright (C) 2026 The risdiff contributors
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

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace risdiff
{
    // Ten significant digits; "nan" for NaN
    inline std::string csv_number(double v)
    {
        if (std::isnan(v))
            return "nan";
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.10g", v);
        return buf;
    }

    // Comma-separated rows with LF endings. Cells holding a comma or quote are quoted.
    // An optional leading '#' line documents column units.
    class CsvWriter
    {
    public:
        explicit CsvWriter(std::ostream &os) : os_(os) {}

        void units(const std::string &text) { os_ << "# units: " << text << '\n'; }

        void header(const std::vector<std::string> &cols) { row(cols); }

        void row(const std::vector<std::string> &cells)
        {
            for (std::size_t i = 0; i < cells.size(); ++i)
            {
                if (i)
                    os_ << ',';
                write_cell(cells[i]);
            }
            os_ << '\n';
        }

    private:
        void write_cell(const std::string &c)
        {
            if (c.find_first_of(",\"\n") == std::string::npos)
            {
                os_ << c;
                return;
            }
            os_ << '"';
            for (char ch : c)
            {
                if (ch == '"')
                    os_ << '"';
                os_ << ch;
            }
            os_ << '"';
        }

        std::ostream &os_;
    };
}
