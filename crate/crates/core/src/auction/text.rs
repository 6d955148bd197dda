//! Line-oriented order book format: `side price quantity owner` per line.
//!
//! `side` is one of `ask`, `sell`, `buy`; `quantity` is in physical units and
//! must be a multiple of the resolution. Blank lines and `#` comments are
//! ignored.

use super::{Order, OwnerId, Side};
use crate::error::BookError;
use crate::units::Resolution;

pub fn parse_orders(text: &str, resolution: Resolution) -> Result<Vec<Order>, BookError> {
    let mut orders = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |reason: &str| BookError::Parse {
            line: line_no,
            reason: reason.to_string(),
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(bad("expected `side price quantity owner`"));
        }
        let side = match fields[0].to_ascii_lowercase().as_str() {
            "ask" => Side::Ask,
            "sell" => Side::SellBid,
            "buy" => Side::Buy,
            _ => return Err(bad("side must be ask, sell or buy")),
        };
        let price: f64 = fields[1].parse().map_err(|_| bad("invalid price"))?;
        let physical: f64 = fields[2].parse().map_err(|_| bad("invalid quantity"))?;
        let owner: u32 = fields[3].parse().map_err(|_| bad("invalid owner"))?;
        let quantity = resolution.to_units(physical);
        if (resolution.to_physical(quantity) - physical).abs() > resolution.0 * 1e-6 {
            return Err(bad("quantity is not a multiple of the resolution"));
        }
        orders.push(Order::new(OwnerId(owner), side, price, quantity));
    }
    Ok(orders)
}

pub fn format_orders<'a>(orders: impl IntoIterator<Item = &'a Order>, resolution: Resolution) -> String {
    let decimals = resolution.decimals();
    let mut out = String::new();
    for o in orders {
        out.push_str(&format!(
            "{} {} {:.*} {}\n",
            o.side.token(),
            o.price,
            decimals,
            resolution.to_physical(o.quantity),
            o.owner
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::Qty;

    #[test]
    fn parses_with_comments() {
        let text = "# header\nask 10 5 0\n\nbuy 30.5 4.25 1 # trailing\nsell 0 0.001 2\n";
        let orders = parse_orders(text, Resolution::default()).unwrap();
        assert_eq!(orders.len(), 3);
        assert_eq!(orders[1].price, 30.5);
        assert_eq!(orders[1].quantity, Qty(4250));
        assert_eq!(orders[2].side, Side::SellBid);
    }

    #[test]
    fn rejects_malformed_lines() {
        let r = Resolution::default();
        assert!(matches!(
            parse_orders("bid 1 1 1", r),
            Err(BookError::Parse { line: 1, .. })
        ));
        assert!(parse_orders("ask x 1 0", r).is_err());
        assert!(parse_orders("ask 1 1", r).is_err());
        assert!(parse_orders("ask 1 0.0005 0", r).is_err());
    }
}
