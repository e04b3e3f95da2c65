import { describe, expect, it } from "vitest";

import { StrokeSession } from "../src/strokes";

function draw(session: StrokeSession, pts: [number, number][], width = 2): void {
  const [head, ...rest] = pts;
  session.begin(head[0], head[1], width);
  for (const [x, y] of rest) session.extend(x, y);
  session.end();
}

describe("StrokeSession", () => {
  it("starts empty and disables submit paths", () => {
    const s = new StrokeSession(64);
    expect(s.isEmpty).toBe(true);
  });

  it("undo/redo restores the exact prior stroke lists", () => {
    const s = new StrokeSession(64);
    draw(s, [[1, 1], [10, 10]]);
    draw(s, [[5, 20], [6, 21], [7, 22]], 4);
    const withTwo = s.snapshot();
    s.undo();
    const withOne = s.snapshot();
    expect(withOne).toEqual(withTwo.slice(0, 1));
    s.redo();
    expect(s.snapshot()).toEqual(withTwo);
    s.undo();
    s.undo();
    expect(s.isEmpty).toBe(true);
    s.redo();
    s.redo();
    expect(s.snapshot()).toEqual(withTwo);
  });

  it("a new stroke clears the redo stack", () => {
    const s = new StrokeSession(64);
    draw(s, [[0, 0], [3, 3]]);
    draw(s, [[9, 9], [12, 12]]);
    s.undo();
    draw(s, [[20, 20], [25, 25]]);
    s.redo(); // nothing to redo anymore
    expect(s.strokes.length).toBe(2);
    expect(s.strokes[1].points[0]).toEqual({ x: 20, y: 20 });
  });

  it("clear empties everything", () => {
    const s = new StrokeSession(64);
    draw(s, [[0, 0], [3, 3]]);
    s.clear();
    expect(s.isEmpty).toBe(true);
    s.redo();
    expect(s.isEmpty).toBe(true);
  });
});
