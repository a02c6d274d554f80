//! The analytic cost table: expensive-product counts for a roster of
//! moduli across input sizes, plus the competing classic transform length.
//!
//! Counts are closed-form, nothing is executed. An optional timing profile
//! would scale each row's count into seconds; this example stays
//! machine-neutral and prints the counts themselves.

use gfpmul::costmodel;
use gfpmul::textio;

fn main() {
    let roster: &[(u64, u32)] = &[
        (2097208, 3),
        (74, 4),
        (2072, 4),
        (54, 5),
        (562, 5),
        (131090, 5),
        (102, 6),
        (562, 6),
    ];
    for log_n in [30u32, 36, 40, 46] {
        let n = 1u64 << log_n;
        println!("n = 2^{log_n}:");
        // Moduli too small for the input are reported, not silently
        // dropped: the roster is caller data, and a hole in the table is
        // information.
        for &(r, lambda) in roster {
            match costmodel::table_report(n, &[(r, lambda)], None) {
                Ok(rows) => println!("  {}", textio::format_cost_record(&rows[0])),
                Err(e) => println!("  r={r} lambda={lambda}: {e}"),
            }
        }
        println!(
            "  classic radix-2 split for comparison: length {}, {} expensive products",
            costmodel::ssa_transform_length(n),
            costmodel::fermat_fft_count(costmodel::ssa_transform_length(n), 1)
        );
    }
}
