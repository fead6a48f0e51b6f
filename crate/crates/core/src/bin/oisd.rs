// Copyright 2026 oisd-lab Contributors
// SPDX-License-Identifier: Apache-2.0

fn main() {
    std::process::exit(oisd_lab::cli::run(std::env::args_os()));
}
