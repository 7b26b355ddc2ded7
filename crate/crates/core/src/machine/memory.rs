use std::collections::BTreeMap;
use std::sync::Arc;

/// Word-addressed memory of a fixed size.
///
/// Stored as an immutable byte image (the loaded input) plus a sparse overlay
/// of written words. Equality compares logical contents, so two memories
/// holding the same words are equal however they were built.
#[derive(Debug, Clone)]
pub struct Memory {
    cells: u64,
    image: Arc<[u8]>,
    overlay: BTreeMap<u64, u32>,
}

impl Memory {
    pub fn zeroed(cells: u64) -> Self {
        Memory {
            cells,
            image: Arc::from(Vec::new()),
            overlay: BTreeMap::new(),
        }
    }

    /// Memory whose first cells hold `bytes`. Caller checks the length.
    pub fn with_image(cells: u64, bytes: &[u8]) -> Self {
        debug_assert!(bytes.len() as u64 <= cells);
        Memory {
            cells,
            image: Arc::from(bytes),
            overlay: BTreeMap::new(),
        }
    }

    pub fn cells(&self) -> u64 {
        self.cells
    }

    fn wrap(&self, addr: u64) -> u64 {
        addr & (self.cells - 1)
    }

    pub fn get(&self, addr: u64) -> u32 {
        let a = self.wrap(addr);
        if let Some(&w) = self.overlay.get(&a) {
            return w;
        }
        self.image.get(a as usize).map_or(0, |&b| u32::from(b))
    }

    pub fn set(&mut self, addr: u64, value: u32) {
        let a = self.wrap(addr);
        self.overlay.insert(a, value);
    }

    /// Nonzero cells in address order.
    pub fn nonzero(&self) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut overlay = self.overlay.iter().peekable();
        for (i, &b) in self.image.iter().enumerate() {
            let addr = i as u64;
            while let Some((&a, &w)) = overlay.peek() {
                if a >= addr {
                    break;
                }
                if w != 0 {
                    out.push((a, w));
                }
                overlay.next();
            }
            match overlay.peek() {
                Some((&a, &w)) if a == addr => {
                    if w != 0 {
                        out.push((a, w));
                    }
                    overlay.next();
                }
                _ => {
                    if b != 0 {
                        out.push((addr, u32::from(b)));
                    }
                }
            }
        }
        out.extend(overlay.filter(|(_, &w)| w != 0).map(|(&a, &w)| (a, w)));
        out
    }
}

impl PartialEq for Memory {
    fn eq(&self, other: &Self) -> bool {
        self.cells == other.cells && self.nonzero() == other.nonzero()
    }
}

impl Eq for Memory {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wraps_and_overlays() {
        let mut m = Memory::with_image(8, &[1, 2, 3]);
        assert_eq!(m.get(1), 2);
        assert_eq!(m.get(9), 2);
        m.set(9, 40);
        assert_eq!(m.get(1), 40);
        assert_eq!(m.get(7), 0);
        assert_eq!(m.nonzero(), vec![(0, 1), (1, 40), (2, 3)]);
    }

    #[test]
    fn equality_is_logical() {
        let a = Memory::with_image(16, &[0, 5, 0]);
        let mut b = Memory::zeroed(16);
        b.set(1, 5);
        b.set(2, 0);
        assert_eq!(a, b);
        b.set(12, 1);
        assert_ne!(a, b);
    }
}
