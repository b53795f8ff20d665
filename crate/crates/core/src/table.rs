//! Plain-text decoding tables: one row per client with its window followed by
//! what it decodes from each transmission.

use crate::decoder::static_grid;
use crate::instance::{side_info, MessageId};
use crate::schemes::Schedule;

/// Cell marker for a transmission that yields nothing new.
pub const NO_DECODE: &str = "−";

fn set_label<'a>(
    messages: impl IntoIterator<Item = &'a MessageId>,
    m: usize,
    start: usize,
) -> String {
    // Window order rather than numeric order, so wraparound reads naturally.
    let mut v: Vec<MessageId> = messages.into_iter().copied().collect();
    v.sort_by_key(|x| (x.0 + m - start) % m);
    let inner: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("{{{}}}", inner.join(","))
}

/// Header row plus one row per client; every cell already formatted.
pub fn table_cells(schedule: &Schedule) -> Vec<Vec<String>> {
    let inst = &schedule.instance;
    let grid = static_grid(inst, &schedule.transmissions);
    let mut rows = Vec::with_capacity(inst.c() + 1);
    let mut header = vec!["client".to_string(), "side information".to_string()];
    header.extend((1..=schedule.len()).map(|j| format!("W{j}")));
    rows.push(header);
    for (client, cells) in inst.clients().zip(grid) {
        let mut row = vec![
            client.to_string(),
            set_label(
                &side_info(inst, client),
                inst.m(),
                inst.window_start(client),
            ),
        ];
        row.extend(
            cells
                .into_iter()
                .map(|c| c.map_or_else(|| NO_DECODE.to_string(), |x| x.to_string())),
        );
        rows.push(row);
    }
    rows
}

/// Column widths come from the content, so identical input renders to
/// identical bytes.
pub fn render_table(schedule: &Schedule) -> String {
    let rows = table_cells(schedule);
    let columns = rows[0].len();
    let widths: Vec<usize> = (0..columns)
        .map(|j| rows.iter().map(|r| r[j].chars().count()).max().unwrap_or(0))
        .collect();
    let line = |row: &[String]| {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, &w)| format!("{cell:<w$}"))
            .collect();
        cells.join(" | ").trim_end().to_string()
    };
    let mut out = String::new();
    out.push_str(&line(&rows[0]));
    out.push('\n');
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    out.push_str(&rule.join("-+-"));
    out.push('\n');
    for row in &rows[1..] {
        out.push_str(&line(row));
        out.push('\n');
    }
    out
}
