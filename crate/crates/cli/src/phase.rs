// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Phase arguments such as `pi`, `3pi/2`, `-pi/4`, `0.5*pi` or `1.2`.

use std::f64::consts::PI;

pub fn parse_phase(text: &str) -> Result<f64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_ascii_lowercase();
    let s = s.replace('π', "pi");
    let Some(at) = s.find("pi") else {
        return s.parse::<f64>().map_err(|_| format!("cannot read phase '{text}'"));
    };
    let (head, tail) = (&s[..at], &s[at + 2..]);
    let coefficient = match head.trim_end_matches('*') {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| format!("cannot read coefficient in '{text}'"))?,
    };
    let divisor = match tail {
        "" => 1.0,
        t => t
            .strip_prefix('/')
            .and_then(|d| d.parse::<f64>().ok())
            .filter(|d| *d != 0.0)
            .ok_or_else(|| format!("cannot read divisor in '{text}'"))?,
    };
    Ok(coefficient * PI / divisor)
}
