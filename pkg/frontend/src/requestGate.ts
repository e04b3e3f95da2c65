// Monotonic sequence tokens so only the latest response may render.

export interface RequestGate {
  next: () => number;
  isLatest: (token: number) => boolean;
  invalidate: () => void;
}

export function createRequestGate(): RequestGate {
  let current = 0;
  return {
    next() {
      current += 1;
      return current;
    },
    isLatest(token: number) {
      return token === current;
    },
    invalidate() {
      current += 1;
    },
  };
}
