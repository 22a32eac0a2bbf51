//! Tapped delay lines.

/// Fixed-length delay line of `width`-element frames, newest first.
///
/// Storage is mirrored (every frame written twice, `taps` frames apart) so
/// the whole line is always one contiguous slice, no matter where the write
/// head sits. Frames that have not been written yet read as zero.
#[derive(Debug, Clone)]
pub struct TapRing<T> {
    width: usize,
    taps: usize,
    head: usize,
    filled: usize,
    data: Vec<T>,
}

impl<T: Copy + Default> TapRing<T> {
    pub fn new(taps: usize, width: usize) -> Self {
        assert!(
            taps >= 1 && width >= 1,
            "delay line needs at least one tap and one lane"
        );
        TapRing {
            width,
            taps,
            head: 0,
            filled: 0,
            data: vec![T::default(); 2 * taps * width],
        }
    }

    pub fn taps(&self) -> usize {
        self.taps
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Number of frames written so far, saturating at `taps`.
    pub fn filled(&self) -> usize {
        self.filled
    }

    pub fn clear(&mut self) {
        self.data.fill(T::default());
        self.head = 0;
        self.filled = 0;
    }

    /// Advances the line and returns the newly freed slot (position 0) for
    /// the caller to fill. Call [`TapRing::commit`] afterwards.
    #[inline]
    pub fn advance(&mut self) -> &mut [T] {
        self.head = if self.head == 0 { self.taps - 1 } else { self.head - 1 };
        self.filled = (self.filled + 1).min(self.taps);
        let start = self.head * self.width;
        &mut self.data[start..start + self.width]
    }

    /// Copies position 0 into its mirror slot.
    #[inline]
    pub fn commit(&mut self) {
        let src = self.head * self.width;
        let dst = (self.head + self.taps) * self.width;
        self.data.copy_within(src..src + self.width, dst);
    }

    #[inline]
    pub fn push(&mut self, frame: &[T]) {
        debug_assert_eq!(frame.len(), self.width);
        self.advance().copy_from_slice(frame);
        self.commit();
    }

    #[inline]
    pub fn push_scalar(&mut self, v: T) {
        self.advance()[0] = v;
        self.commit();
    }

    /// All `taps * width` values, newest frame first.
    #[inline]
    pub fn flat(&self) -> &[T] {
        let start = self.head * self.width;
        &self.data[start..start + self.taps * self.width]
    }

    #[inline]
    pub fn frame(&self, k: usize) -> &[T] {
        &self.flat()[k * self.width..(k + 1) * self.width]
    }

    /// Frames actually written, newest first.
    pub fn frames(&self) -> impl Iterator<Item = &[T]> {
        self.flat().chunks_exact(self.width).take(self.filled)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newest_first_with_zero_padding() {
        let mut r = TapRing::<f64>::new(3, 1);
        r.push_scalar(1.0);
        assert_eq!(r.flat(), &[1.0, 0.0, 0.0]);
        r.push_scalar(2.0);
        r.push_scalar(3.0);
        r.push_scalar(4.0);
        assert_eq!(r.flat(), &[4.0, 3.0, 2.0]);
        assert_eq!(r.filled(), 3);
    }

    #[test]
    fn frames_skip_unwritten_slots() {
        let mut r = TapRing::<f64>::new(4, 2);
        r.push(&[1.0, 2.0]);
        r.push(&[3.0, 4.0]);
        let frames: Vec<_> = r.frames().collect();
        assert_eq!(frames, vec![&[3.0, 4.0][..], &[1.0, 2.0][..]]);
        assert_eq!(r.frame(2), &[0.0, 0.0]);
    }

    #[test]
    fn clear_restores_zero_state() {
        let mut r = TapRing::<f64>::new(2, 1);
        r.push_scalar(5.0);
        r.clear();
        assert_eq!(r.flat(), &[0.0, 0.0]);
        assert_eq!(r.filled(), 0);
    }
}
